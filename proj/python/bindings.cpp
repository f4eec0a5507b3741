#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "evok/link_sim.hpp"
#include "evok/ppg.hpp"
#include "evok/protocol.hpp"
#include "evok/receiver.hpp"
#include "evok/ui_messages.hpp"

namespace py = pybind11;
using namespace evok;

namespace {

using SampleTuple = std::pair<std::int64_t, double>;

std::vector<PpgSample> to_samples(const std::vector<SampleTuple>& in) {
    std::vector<PpgSample> out;
    out.reserve(in.size());
    for (const auto& [t, a] : in) out.push_back({t, a});
    return out;
}

BpmProfile to_profile(const std::vector<std::pair<std::int64_t, int>>& points) {
    BpmProfile p;
    for (const auto& [t, bpm] : points) p.push_back({t, bpm});
    return p;
}

std::vector<std::uint8_t> to_vector(const py::bytes& b) {
    const std::string s = b;
    return {s.begin(), s.end()};
}

py::bytes to_bytes(std::span<const std::uint8_t> v) {
    return {reinterpret_cast<const char*>(v.data()), v.size()};
}

NoiseProfile noise_from(const py::object& noise) {
    if (py::isinstance<py::str>(noise)) return noise_preset(noise.cast<std::string>());
    const auto d = noise.cast<py::dict>();
    NoiseProfile n;
    const auto get = [&d](const char* key, double fallback) {
        return d.contains(key) ? d[key].cast<double>() : fallback;
    };
    n.white_noise_sigma = get("white_noise_sigma", 0.0);
    n.baseline_wander_amp = get("baseline_wander_amp", 0.0);
    n.baseline_wander_freq_hz = get("baseline_wander_freq_hz", 0.0);
    n.artifact_rate_per_min = get("artifact_rate_per_min", 0.0);
    n.artifact_amp = get("artifact_amp", 0.0);
    return n;
}

/// Stateful wrapper over the pure receiver step for interactive use.
class PyReceiver {
public:
    PyReceiver(int group_id, int low, int high, std::int64_t alarm_after_ms) {
        config_.group_id = static_cast<std::uint8_t>(group_id);
        config_.alarm_after_ms = alarm_after_ms;
        const receiver::NormalRange range{low, high};
        if (!range.valid()) throw py::value_error("range must satisfy 30 <= low < high <= 220");
        state_.range = range;
    }

    std::vector<std::string> apply(const receiver::Event& ev) {
        auto r = receiver::step(config_, state_, ev);
        if (r.error) throw py::value_error("range must satisfy 30 <= low < high <= 220");
        state_ = std::move(r.state);
        last_ms_ = receiver::event_time(ev);
        std::vector<std::string> out;
        for (const auto& e : r.effects) out.push_back(receiver::describe(e));
        return out;
    }

    std::string state_json() const { return ui::state_message(state_, last_ms_).dump(); }
    std::string zone() const { return std::string(receiver::to_string(state_.zone)); }

private:
    receiver::ReceiverConfig config_;
    receiver::ReceiverState state_;
    std::int64_t last_ms_ = 0;
};

}  // namespace

PYBIND11_MODULE(_evok, m) {
    m.doc() = "EvoK heart-rate link: signal processing, wire protocol, receiver logic";

    py::register_exception<protocol::InvalidFrame>(m, "InvalidFrame", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ProfileParseError", PyExc_ValueError);
    py::register_exception<InvalidProfile>(m, "InvalidProfile", PyExc_ValueError);

    m.def("noise_preset_names", [] { return std::vector<std::string>{"none", "earlobe", "fingertip"}; });

    m.def(
        "generate_ppg",
        [](const std::vector<std::pair<std::int64_t, int>>& profile, std::int64_t duration_ms, int sample_rate_hz,
           const py::object& noise, std::uint64_t seed) {
            const auto g = generate_ppg(to_profile(profile), duration_ms, sample_rate_hz, noise_from(noise), seed);
            std::vector<SampleTuple> samples;
            samples.reserve(g.samples.size());
            for (const auto& s : g.samples) samples.emplace_back(s.t_ms, s.amplitude);
            return py::make_tuple(samples, g.peak_times_ms);
        },
        py::arg("profile"), py::arg("duration_ms"), py::arg("sample_rate_hz") = 50, py::arg("noise") = "earlobe",
        py::arg("seed") = 1, "Returns (samples as [(t_ms, amplitude)], ground-truth peak times).");

    m.def(
        "detect_beats",
        [](const std::vector<SampleTuple>& samples) {
            std::vector<std::pair<std::int64_t, std::optional<std::int64_t>>> out;
            for (const auto& b : detect_beats(to_samples(samples))) out.emplace_back(b.t_ms, b.ibi_ms);
            return out;
        },
        py::arg("samples"), "Returns [(t_ms, ibi_ms or None)].");

    m.def(
        "estimate_rate",
        [](const std::vector<std::pair<std::int64_t, std::optional<std::int64_t>>>& beats, std::int64_t now_ms,
           std::int64_t stream_start_ms) {
            std::vector<BeatEvent> events;
            for (const auto& [t, ibi] : beats) events.push_back({t, ibi});
            const auto e = estimate_rate(events, now_ms, {}, stream_start_ms);
            py::dict d;
            d["bpm"] = e.bpm ? py::cast(*e.bpm) : py::none();
            d["warmed_up"] = e.warmed_up;
            d["contact_ok"] = e.contact_ok;
            return d;
        },
        py::arg("beats"), py::arg("now_ms"), py::arg("stream_start_ms") = 0);

    m.def(
        "parse_bpm_profile",
        [](const std::string& text) {
            std::vector<std::pair<std::int64_t, int>> out;
            for (const auto& p : parse_bpm_profile(text)) out.emplace_back(p.t_ms, p.bpm);
            return out;
        },
        py::arg("text"));

    // protocol
    py::enum_<protocol::MsgType>(m, "MsgType")
        .value("HR_DATA", protocol::MsgType::HrData)
        .value("HELLO", protocol::MsgType::Hello);

    py::class_<protocol::Frame>(m, "Frame")
        .def(py::init([](protocol::MsgType msg_type, int group_id, std::uint32_t sender_id, std::uint32_t seq,
                         std::uint64_t timestamp_ms, int bpm, int flags) {
                 if (group_id < 0 || group_id > 255) throw py::value_error("group_id must fit in a byte");
                 if (bpm < 0 || bpm > 0xFFFF || flags < 0 || flags > 255) throw py::value_error("bpm/flags out of range");
                 return protocol::Frame{protocol::kVersion, msg_type, static_cast<std::uint8_t>(group_id), sender_id,
                                        seq, timestamp_ms, static_cast<std::uint16_t>(bpm),
                                        static_cast<std::uint8_t>(flags)};
             }),
             py::kw_only(), py::arg("msg_type") = protocol::MsgType::HrData, py::arg("group_id") = 0,
             py::arg("sender_id") = 0, py::arg("seq") = 0, py::arg("timestamp_ms") = 0, py::arg("bpm") = 0,
             py::arg("flags") = 0)
        .def_readonly("version", &protocol::Frame::version)
        .def_readonly("msg_type", &protocol::Frame::msg_type)
        .def_readonly("group_id", &protocol::Frame::group_id)
        .def_readonly("sender_id", &protocol::Frame::sender_id)
        .def_readonly("seq", &protocol::Frame::seq)
        .def_readonly("timestamp_ms", &protocol::Frame::timestamp_ms)
        .def_readonly("bpm", &protocol::Frame::bpm)
        .def_readonly("flags", &protocol::Frame::flags)
        .def(py::self == py::self)
        .def("__repr__", [](const protocol::Frame& f) {
            return "Frame(msg_type=" + std::string(f.msg_type == protocol::MsgType::Hello ? "HELLO" : "HR_DATA") +
                   ", group_id=" + std::to_string(f.group_id) + ", sender_id=" + std::to_string(f.sender_id) +
                   ", seq=" + std::to_string(f.seq) + ", timestamp_ms=" + std::to_string(f.timestamp_ms) +
                   ", bpm=" + std::to_string(f.bpm) + ", flags=" + std::to_string(f.flags) + ")";
        });

    m.attr("FRAME_SIZE") = protocol::kFrameSize;
    m.attr("FLAG_WARMUP") = protocol::flags::kWarmup;
    m.attr("FLAG_CONTACT_LOST") = protocol::flags::kContactLost;
    m.attr("DEFAULT_PORT") = protocol::kDefaultPort;

    m.def("encode", [](const protocol::Frame& f) { return to_bytes(protocol::encode(f)); }, py::arg("frame"));
    m.def(
        "decode",
        [](const py::bytes& data) -> py::object {
            const auto bytes = to_vector(data);
            auto r = protocol::decode(bytes);
            if (auto* f = std::get_if<protocol::Frame>(&r)) return py::cast(*f);
            return py::str(std::string(protocol::to_string(std::get<protocol::DecodeError>(r))));
        },
        py::arg("data"), "Returns a Frame, or the error name as a string.");
    m.def("crc16", [](const py::bytes& data) { return protocol::crc16_ccitt_false(to_vector(data)); });
    m.def("accepts", &protocol::accepts, py::arg("receiver_group"), py::arg("last_seq"), py::arg("frame"));

    // receiver
    m.def(
        "classify_zone",
        [](int bpm, int low, int high) { return std::string(receiver::to_string(receiver::classify_zone(bpm, {low, high}))); },
        py::arg("bpm"), py::arg("low") = 60, py::arg("high") = 100);
    m.def("display_sequence", &receiver::display_sequence, py::arg("bpm"));

    py::class_<PyReceiver>(m, "_Receiver")
        .def(py::init<int, int, int, std::int64_t>(), py::arg("group_id") = 0, py::arg("low") = 60,
             py::arg("high") = 100, py::arg("alarm_after_ms") = 15000)
        .def("frame", [](PyReceiver& r, const protocol::Frame& f, std::int64_t now) {
            return r.apply(receiver::FrameArrived{f, now});
        })
        .def("tick", [](PyReceiver& r, std::int64_t now) { return r.apply(receiver::Tick{now}); })
        .def("toggle_pause", [](PyReceiver& r, std::int64_t now) { return r.apply(receiver::TogglePause{now}); })
        .def("set_range", [](PyReceiver& r, int low, int high, std::int64_t now) {
            return r.apply(receiver::SetRange{{low, high}, now});
        })
        .def_property_readonly("zone", &PyReceiver::zone)
        .def("state_json", &PyReceiver::state_json);

    // link simulator
    m.def(
        "simulate_session",
        [](const std::vector<std::pair<std::int64_t, py::bytes>>& datagrams, double drop, std::int64_t delay_ms,
           std::int64_t jitter_ms, double dup, std::uint64_t seed) {
            std::vector<link::Datagram> input;
            for (const auto& [t, b] : datagrams) input.push_back({t, to_vector(b)});
            const link::LinkImpairment imp{drop, delay_ms, jitter_ms, dup, seed};
            std::vector<py::tuple> out;
            for (const auto& d : link::simulate_session(input, imp)) {
                out.push_back(py::make_tuple(d.deliver_ms, d.input_index, d.duplicate, to_bytes(d.bytes)));
            }
            return out;
        },
        py::arg("datagrams"), py::kw_only(), py::arg("drop") = 0.0, py::arg("delay_ms") = 0, py::arg("jitter_ms") = 0,
        py::arg("dup") = 0.0, py::arg("seed") = 0, "Returns [(deliver_ms, input_index, duplicate, bytes)].");
}
