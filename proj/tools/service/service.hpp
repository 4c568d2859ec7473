#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace httplib {
class Server;
}

namespace selbias::service {

struct Options {
    std::size_t max_body_bytes = 50u * 1024u * 1024u;  // uploaded CSV and any other body
    std::size_t max_grid_steps = 500;                  // per axis
    std::size_t max_simulate_rows = 1000000;
    std::string static_dir;                            // served at / when non-empty
};

struct Response {
    int status = 200;
    std::string body;  // JSON envelope {ok, result} or {ok, error}
};

// Routes one request. Pure: the response depends only on the arguments.
Response handle(std::string_view method, std::string_view path, std::string_view body,
                const Options& options = {});

// Registers every route, CORS headers and the static mount on a server.
void install(httplib::Server& server, const Options& options);

}  // namespace selbias::service
