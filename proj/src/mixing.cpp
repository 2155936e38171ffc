#include "epp/mixing.hpp"

#include <cmath>
#include <limits>

#include "epp/errors.hpp"
#include "epp/format.hpp"

namespace epp {

void DecayPrefix::extend_to(int n) {
    while (size() < n) {
        int d = size() + 1;
        sums_.push_back(sums_.back() + std::pow(static_cast<double>(d), -gamma_));
    }
}

MixingScheme::MixingScheme(SchemeKind kind, double alpha, double gamma, bool measure_from_newest)
    : kind_(kind), alpha_(alpha), gamma_(gamma), measure_from_newest_(measure_from_newest) {
    if (!(alpha_ >= 0 && alpha_ <= 1))
        throw InvalidInputError("switch rate must lie in [0,1]");
    if (!(gamma_ >= 0) || !std::isfinite(gamma_))
        throw InvalidInputError("decay exponent must be finite and >= 0");
}

MixingScheme MixingScheme::yesterday() { return {SchemeKind::yesterday, 0, 0, false}; }
MixingScheme MixingScheme::fixed_share(double alpha) {
    return {SchemeKind::fixed_share, alpha, 0, false};
}
MixingScheme MixingScheme::uniform_past(double alpha) {
    return {SchemeKind::uniform_past, alpha, 0, false};
}
MixingScheme MixingScheme::decaying_past(double alpha, double gamma, bool measure_from_newest) {
    return {SchemeKind::decaying_past, alpha, gamma, measure_from_newest};
}
MixingScheme MixingScheme::decaying_past_approx(double alpha, double gamma,
                                                bool measure_from_newest) {
    return {SchemeKind::decaying_past_approx, alpha, gamma, measure_from_newest};
}

MixingScheme MixingScheme::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        auto colon = text.find(':', start);
        parts.push_back(text.substr(start, colon - start));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    auto number = [&](std::size_t i) {
        try {
            std::size_t used = 0;
            double v = std::stod(parts.at(i), &used);
            if (used != parts[i].size()) throw std::invalid_argument("trailing junk");
            return v;
        } catch (const std::exception&) {
            throw InvalidInputError("bad number '" + parts[i] + "' in scheme '" + text + "'");
        }
    };
    auto arity = [&](std::size_t n) {
        if (parts.size() != n)
            throw InvalidInputError("scheme '" + text + "' takes " + std::to_string(n - 1) +
                                    " parameter(s)");
    };
    const std::string& head = parts[0];
    if (head == "yesterday") {
        arity(1);
        return yesterday();
    }
    if (head == "fixedshare") {
        arity(2);
        return fixed_share(number(1));
    }
    if (head == "uniformpast") {
        arity(2);
        return uniform_past(number(1));
    }
    if (head == "decayingpast") {
        arity(3);
        return decaying_past(number(1), number(2));
    }
    if (head == "decayingpast-approx") {
        arity(3);
        return decaying_past_approx(number(1), number(2));
    }
    throw InvalidInputError("unknown mixing scheme '" + text + "'");
}

std::string MixingScheme::to_string() const {
    switch (kind_) {
        case SchemeKind::yesterday: return "yesterday";
        case SchemeKind::fixed_share: return "fixedshare:" + format_double(alpha_);
        case SchemeKind::uniform_past: return "uniformpast:" + format_double(alpha_);
        case SchemeKind::decaying_past:
            return "decayingpast:" + format_double(alpha_) + ":" + format_double(gamma_);
        case SchemeKind::decaying_past_approx:
            return "decayingpast-approx:" + format_double(alpha_) + ":" + format_double(gamma_);
    }
    throw Error("unreachable scheme kind");
}

// Distance of past index j from round t; the newest past index t-1 is at
// distance 1 under measure_from_newest, 2 otherwise.
static double decay_distance(int t, int j, bool measure_from_newest) {
    return static_cast<double>(measure_from_newest ? t - 1 - j : t - j);
}

std::vector<double> MixingScheme::weights(int t) const {
    if (t < 1) throw InvalidInputError("rounds are 1-based");
    std::vector<double> w(static_cast<std::size_t>(t), 0.0);
    if (t == 1) {
        w[0] = 1.0;
        return w;
    }
    switch (kind_) {
        case SchemeKind::yesterday:
            w[static_cast<std::size_t>(t - 1)] = 1.0;
            break;
        case SchemeKind::fixed_share:
            w[static_cast<std::size_t>(t - 1)] = 1.0 - alpha_;
            w[0] += alpha_;
            break;
        case SchemeKind::uniform_past: {
            w[static_cast<std::size_t>(t - 1)] = 1.0 - alpha_;
            double share = alpha_ / static_cast<double>(t - 1);
            for (int j = 0; j < t - 1; ++j) w[static_cast<std::size_t>(j)] += share;
            break;
        }
        case SchemeKind::decaying_past: {
            w[static_cast<std::size_t>(t - 1)] = 1.0 - alpha_;
            double z = 0;
            for (int j = 0; j < t - 1; ++j)
                z += std::pow(decay_distance(t, j, measure_from_newest_), -gamma_);
            for (int j = 0; j < t - 1; ++j)
                w[static_cast<std::size_t>(j)] +=
                    alpha_ * std::pow(decay_distance(t, j, measure_from_newest_), -gamma_) / z;
            break;
        }
        case SchemeKind::decaying_past_approx: {
            BlockLayout layout = block_layout(t);
            w[static_cast<std::size_t>(t - 1)] = layout.newest_weight;
            for (const auto& block : layout.blocks) {
                double per_index = block.weight / static_cast<double>(block.end - block.begin);
                for (int j = block.begin; j < block.end; ++j)
                    w[static_cast<std::size_t>(j)] += per_index;
            }
            break;
        }
    }
    return w;
}

double MixingScheme::weight(int t, int j) const {
    if (t < 1) throw InvalidInputError("rounds are 1-based");
    if (j < 0 || j >= t) return 0.0;
    if (t == 1) return 1.0;
    switch (kind_) {
        case SchemeKind::yesterday:
            return j == t - 1 ? 1.0 : 0.0;
        case SchemeKind::fixed_share:
            if (j == t - 1) return 1.0 - alpha_;
            return j == 0 ? alpha_ : 0.0;
        case SchemeKind::uniform_past:
            if (j == t - 1) return 1.0 - alpha_;
            return alpha_ / static_cast<double>(t - 1);
        case SchemeKind::decaying_past: {
            if (j == t - 1) return 1.0 - alpha_;
            double z = 0;
            for (int i = 0; i < t - 1; ++i)
                z += std::pow(decay_distance(t, i, measure_from_newest_), -gamma_);
            return alpha_ * std::pow(decay_distance(t, j, measure_from_newest_), -gamma_) / z;
        }
        case SchemeKind::decaying_past_approx: {
            BlockLayout layout = block_layout(t);
            if (j == t - 1) return layout.newest_weight;
            for (const auto& block : layout.blocks)
                if (block.begin <= j && j < block.end)
                    return block.weight / static_cast<double>(block.end - block.begin);
            return 0.0;
        }
    }
    throw Error("unreachable scheme kind");
}

BlockLayout MixingScheme::block_layout(int t) const {
    DecayPrefix prefix(gamma_);
    prefix.extend_to(t);
    return block_layout(t, prefix);
}

BlockLayout MixingScheme::block_layout(int t, const DecayPrefix& prefix) const {
    if (kind_ != SchemeKind::decaying_past && kind_ != SchemeKind::decaying_past_approx)
        throw InvalidInputError("block layout only applies to decaying schemes");
    if (t < 1) throw InvalidInputError("rounds are 1-based");
    if (prefix.size() < t) throw InvalidInputError("prefix cache does not cover round");
    BlockLayout layout;
    if (t == 1) {
        layout.newest_weight = 1.0;
        return layout;
    }
    layout.newest_weight = 1.0 - alpha_;
    int m = t - 1; // past indices 0..t-2
    double z = measure_from_newest_ ? prefix.range(0, t - 1) : prefix.range(1, t);
    int cursor = 0;
    for (int bit = 30; bit >= 0; --bit) {
        int width = 1 << bit;
        if (!(m & width)) continue;
        int begin = cursor, end = cursor + width;
        // Exact total decay mass of indices [begin, end).
        double mass = measure_from_newest_ ? prefix.range(t - end - 1, t - 1 - begin)
                                           : prefix.range(t - end, t - begin);
        layout.blocks.push_back({begin, end, alpha_ * mass / z});
        cursor = end;
    }
    return layout;
}

double MixingScheme::log_partition_prior(const Partition& partition) const {
    double total = 0;
    for (int t = 1; t <= partition.horizon(); ++t) {
        double w = weight(t, partition.prev(t));
        if (w <= 0) return -std::numeric_limits<double>::infinity();
        total += std::log(w);
    }
    return total;
}

double MixingScheme::partition_prior(const Partition& partition) const {
    return std::exp(log_partition_prior(partition));
}

} // namespace epp
