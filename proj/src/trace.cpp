#include "dthp/trace.hpp"

#include "dthp/error.hpp"

namespace dthp {

const char* to_string(MoveKind kind) noexcept {
    switch (kind) {
        case MoveKind::baseline: return "baseline";
        case MoveKind::magnitude: return "magnitude";
        case MoveKind::height: return "height";
        case MoveKind::knot_shift: return "knot_shift";
        case MoveKind::birth: return "birth";
        case MoveKind::death: return "death";
        case MoveKind::rate: return "rate";
    }
    return "unknown";
}

const char* to_string(KernelFamily family) noexcept {
    return family == KernelFamily::histogram ? "histogram" : "geometric";
}

MoveCounters& MoveCounters::operator+=(const MoveCounters& other) {
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        kinds[i].attempted += other.kinds[i].attempted;
        kinds[i].accepted += other.kinds[i].accepted;
        kinds[i].skipped += other.kinds[i].skipped;
    }
    return *this;
}

std::vector<SampleTrace> SampleTrace::split_by_chain() const {
    if (chains.size() <= 1) {
        return {*this};
    }
    std::vector<SampleTrace> out;
    out.reserve(chains.size());
    for (const auto& record : chains) {
        if (record.first_draw + record.draw_count > draws.size()) {
            throw Error(ErrorKind::data, "chain record points past the end of the trace");
        }
        SampleTrace part;
        part.dims = dims;
        part.family = family;
        part.counters = record.counters;
        part.config_fingerprint = config_fingerprint;
        const auto first = draws.begin() + static_cast<std::ptrdiff_t>(record.first_draw);
        part.draws.assign(first, first + static_cast<std::ptrdiff_t>(record.draw_count));
        ChainRecord own = record;
        own.first_draw = 0;
        part.chains.push_back(own);
        out.push_back(std::move(part));
    }
    return out;
}

SampleTrace pool(const std::vector<SampleTrace>& chains) {
    if (chains.empty()) {
        throw Error(ErrorKind::invalid_argument, "nothing to pool");
    }
    SampleTrace out;
    out.dims = chains.front().dims;
    out.family = chains.front().family;
    out.config_fingerprint = chains.front().config_fingerprint;
    for (const auto& trace : chains) {
        if (trace.dims != out.dims || trace.family != out.family) {
            throw Error(ErrorKind::dimension_mismatch, "cannot pool traces of different models");
        }
        for (const auto& record : trace.chains) {
            ChainRecord shifted = record;
            shifted.first_draw += out.draws.size();
            out.chains.push_back(shifted);
        }
        if (trace.chains.empty()) {
            out.chains.push_back(ChainRecord{out.chains.size(), 0, out.draws.size(), trace.draws.size(),
                                             trace.counters});
        }
        out.draws.insert(out.draws.end(), trace.draws.begin(), trace.draws.end());
        out.counters += trace.counters;
    }
    return out;
}

}  // namespace dthp
