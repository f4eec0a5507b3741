#include "evok/link_sim.hpp"

#include <cmath>
#include <stdexcept>

namespace evok::link {

void LinkImpairment::validate() const {
    const auto prob_ok = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };
    if (!prob_ok(drop_prob)) throw std::invalid_argument("drop probability must be within [0, 1]");
    if (!prob_ok(duplicate_prob)) throw std::invalid_argument("duplicate probability must be within [0, 1]");
    if (delay_base_ms < 0) throw std::invalid_argument("base delay must be non-negative");
    if (delay_jitter_ms < 0 || delay_jitter_ms > 1000) throw std::invalid_argument("jitter must be within [0, 1000] ms");
}

ImpairmentModel::ImpairmentModel(LinkImpairment imp) : imp_(imp), rng_(imp.seed) { imp_.validate(); }

Decision ImpairmentModel::next() {
    Decision d;
    if (rng_.next_double() < imp_.drop_prob) {
        d.dropped = true;
        return d;
    }
    if (imp_.duplicate_prob > 0.0) d.duplicated = rng_.next_double() < imp_.duplicate_prob;
    d.delay_ms = imp_.delay_base_ms;
    d.dup_delay_ms = imp_.delay_base_ms;
    if (imp_.delay_jitter_ms > 0) {
        d.delay_ms += rng_.uniform_int(imp_.delay_jitter_ms);
        if (d.duplicated) d.dup_delay_ms += rng_.uniform_int(imp_.delay_jitter_ms);
    }
    return d;
}

void DelayQueue::push(Delivery d) { heap_.push({std::move(d), counter_++}); }

Delivery DelayQueue::pop() {
    Delivery d = heap_.top().delivery;
    heap_.pop();
    return d;
}

std::vector<Delivery> simulate_session(std::span<const Datagram> input, const LinkImpairment& imp) {
    ImpairmentModel model(imp);
    DelayQueue queue;
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (i > 0 && input[i].send_ms < input[i - 1].send_ms) {
            throw std::invalid_argument("send times must be non-decreasing");
        }
        const Decision d = model.next();
        if (d.dropped) continue;
        queue.push({input[i].send_ms + d.delay_ms, i, false, input[i].bytes});
        if (d.duplicated) queue.push({input[i].send_ms + d.dup_delay_ms, i, true, input[i].bytes});
    }
    std::vector<Delivery> out;
    out.reserve(queue.size());
    while (!queue.empty()) out.push_back(queue.pop());
    return out;
}

std::vector<Delivery> simulate_session(std::span<const TimedFrame> frames, const LinkImpairment& imp) {
    std::vector<Datagram> input;
    input.reserve(frames.size());
    for (const auto& f : frames) {
        const auto bytes = protocol::encode(f.frame);
        input.push_back({f.send_ms, {bytes.begin(), bytes.end()}});
    }
    return simulate_session(input, imp);
}

}  // namespace evok::link
