// evok-receiver: notification state machine behind a UDP socket, with an
// optional WebSocket dashboard bridge and headless line output.

#include <csignal>
#include <iostream>

#include <CLI11.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/signal_set.hpp>
#include <spdlog/spdlog.h>

#include "evok/net/proxy.hpp"
#include "evok/net/receiver_service.hpp"
#include "evok/net/udp.hpp"

int main(int argc, char** argv) {
    CLI::App app{"EvoK receiver: renders a sender's heart rate as zones, beeps and alarms"};

    std::string listen = "0.0.0.0:45450";
    int group = 0;
    std::string range = "60:100";
    std::int64_t alarm_after_ms = 15000;
    int ui_port = 8080;
    std::string ui_host = "127.0.0.1";
    std::string ui_dir;
    bool headless = false;
    std::string log_path;

    app.add_option("--listen", listen, "UDP address host:port");
    app.add_option("--group", group, "radio group")->check(CLI::Range(0, 255));
    app.add_option("--range", range, "normal range LOW:HIGH");
    app.add_option("--alarm-after-ms", alarm_after_ms, "sustained-high alarm delay");
    app.add_option("--ui-port", ui_port, "WebSocket/HTTP port for the dashboard (0 disables)");
    app.add_option("--ui-host", ui_host, "bind address for the dashboard port");
    app.add_option("--ui-dir", ui_dir, "serve static dashboard assets from this directory");
    app.add_flag("--headless", headless, "print one state line per update");
    app.add_option("--log", log_path, "NDJSON session log");
    CLI11_PARSE(app, argc, argv);

    boost::asio::io_context ioc;
    evok::net::ReceiverServiceConfig cfg;
    try {
        cfg.listen = evok::net::resolve_udp(ioc, listen);
        cfg.range = evok::receiver::parse_range(range);
        cfg.machine.group_id = static_cast<std::uint8_t>(group);
        cfg.machine.alarm_after_ms = alarm_after_ms;
        if (ui_port > 0) cfg.ui = evok::net::resolve_tcp(ioc, ui_host + ":" + std::to_string(ui_port));
        if (!ui_dir.empty()) cfg.ui_dir = ui_dir;
        if (!log_path.empty()) cfg.log_path = log_path;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 2;
    }

    evok::SteadyClock clock;
    std::unique_ptr<evok::net::ReceiverService> service;
    try {
        service = std::make_unique<evok::net::ReceiverService>(ioc, cfg, clock, headless ? &std::cout : nullptr);
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 3;
    }

    boost::asio::signal_set signals(ioc, SIGINT, SIGTERM);
    signals.async_wait([&](const boost::system::error_code&, int) {
        service->stop();
        ioc.stop();
    });

    service->start();
    spdlog::info("listening on udp port {}{}", service->udp_port(),
                 service->ui_port() ? fmt::format(", dashboard on port {}", *service->ui_port()) : "");
    ioc.run();
    return 0;
}
