// evok-sim: seeded UDP impairment proxy (drop, delay, jitter, duplication).

#include <csignal>

#include <CLI11.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/signal_set.hpp>
#include <spdlog/spdlog.h>

#include "evok/net/proxy.hpp"
#include "evok/net/udp.hpp"

int main(int argc, char** argv) {
    CLI::App app{"EvoK link simulator: a lossy radio channel between sender and receiver"};

    std::string listen = "127.0.0.1:45451";
    std::string forward = "127.0.0.1:45450";
    evok::link::LinkImpairment imp;

    app.add_option("--listen", listen, "inbound UDP address host:port");
    app.add_option("--forward", forward, "outbound UDP address host:port");
    app.add_option("--drop", imp.drop_prob, "drop probability")->check(CLI::Range(0.0, 1.0));
    app.add_option("--delay-ms", imp.delay_base_ms, "base delay")->check(CLI::NonNegativeNumber);
    app.add_option("--jitter-ms", imp.delay_jitter_ms, "uniform extra delay bound")->check(CLI::Range(0, 1000));
    app.add_option("--dup", imp.duplicate_prob, "duplicate probability")->check(CLI::Range(0.0, 1.0));
    app.add_option("--seed", imp.seed, "RNG seed");
    CLI11_PARSE(app, argc, argv);

    boost::asio::io_context ioc;
    evok::SteadyClock clock;
    std::unique_ptr<evok::net::ImpairmentProxy> proxy;
    try {
        proxy = std::make_unique<evok::net::ImpairmentProxy>(ioc, evok::net::resolve_udp(ioc, listen),
                                                             evok::net::resolve_udp(ioc, forward), imp, clock);
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 2;
    }

    boost::asio::signal_set signals(ioc, SIGINT, SIGTERM);
    signals.async_wait([&](const boost::system::error_code&, int) {
        proxy->stop();
        ioc.stop();
    });

    proxy->start();
    spdlog::info("proxy {} -> {} (drop {}, delay {} ms, jitter {} ms, dup {}, seed {})", listen, forward,
                 imp.drop_prob, imp.delay_base_ms, imp.delay_jitter_ms, imp.duplicate_prob, imp.seed);
    ioc.run();
    const auto& s = proxy->stats();
    spdlog::info("received {} dropped {} duplicated {} forwarded {}", s.received, s.dropped, s.duplicated,
                 s.forwarded);
    return 0;
}
