#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>

#include "service.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Stateless JSON service for selection bias bounds", "selbias-serve"};
    std::string host = "127.0.0.1";
    int port = 8080;
    selbias::service::Options options;
    std::size_t max_mb = options.max_body_bytes / (1024u * 1024u);
    app.add_option("--host", host)->capture_default_str();
    app.add_option("--port", port)->capture_default_str()->check(CLI::Range(0, 65535));
    app.add_option("--static", options.static_dir, "Directory of workbench assets served at /");
    app.add_option("--max-upload-mb", max_mb, "Request body cap")->capture_default_str();
    CLI11_PARSE(app, argc, argv);
    options.max_body_bytes = max_mb * 1024u * 1024u;

    httplib::Server server;
    selbias::service::install(server, options);
    std::cerr << "selbias-serve listening on http://" << host << ':' << port << '\n';
    if (!server.listen(host, port)) {
        std::cerr << "selbias-serve: cannot listen on " << host << ':' << port << '\n';
        return 1;
    }
    return 0;
}
