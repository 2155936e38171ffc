#include "epp/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "epp/errors.hpp"

namespace epp {

static void sort_and_check_keys(std::vector<Distribution::Entry>& entries) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].first == entries[i - 1].first)
            throw InvalidInputError("duplicate key " + std::to_string(entries[i].first) +
                                    " in distribution");
    }
}

Distribution Distribution::checked(std::vector<Entry> entries, double tol) {
    sort_and_check_keys(entries);
    double total = 0;
    for (const auto& [key, mass] : entries) {
        if (mass < 0)
            throw InvalidInputError("negative mass " + std::to_string(mass) + " for key " +
                                    std::to_string(key));
        total += mass;
    }
    if (std::abs(total - 1.0) > tol)
        throw InvalidInputError("distribution mass " + std::to_string(total) +
                                " is not 1 within tolerance");
    Distribution d;
    d.entries_ = std::move(entries);
    d.prune();
    return d;
}

Distribution Distribution::unnormalized(std::vector<Entry> entries) {
    sort_and_check_keys(entries);
    for (const auto& [key, mass] : entries) {
        if (mass < 0)
            throw InvalidInputError("negative mass " + std::to_string(mass) + " for key " +
                                    std::to_string(key));
    }
    Distribution d;
    d.entries_ = std::move(entries);
    d.prune();
    return d;
}

Distribution Distribution::point_mass(StateId key) {
    Distribution d;
    d.entries_.emplace_back(key, 1.0);
    return d;
}

double Distribution::prob(StateId key) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                               [](const Entry& e, StateId k) { return e.first < k; });
    if (it != entries_.end() && it->first == key) return it->second;
    return 0.0;
}

double Distribution::sum() const {
    double total = 0;
    for (const auto& [key, mass] : entries_) total += mass;
    return total;
}

void Distribution::scale(double factor) {
    for (auto& [key, mass] : entries_) mass *= factor;
}

void Distribution::add_scaled(const Distribution& other, double w) {
    if (w == 0.0 || other.entries_.empty()) return;
    std::vector<Entry> merged;
    merged.reserve(entries_.size() + other.entries_.size());
    auto a = entries_.begin();
    auto b = other.entries_.begin();
    while (a != entries_.end() || b != other.entries_.end()) {
        if (b == other.entries_.end() || (a != entries_.end() && a->first < b->first)) {
            merged.push_back(*a++);
        } else if (a == entries_.end() || b->first < a->first) {
            merged.emplace_back(b->first, w * b->second);
            ++b;
        } else {
            merged.emplace_back(a->first, a->second + w * b->second);
            ++a, ++b;
        }
    }
    entries_ = std::move(merged);
}

void Distribution::normalize() {
    double total = sum();
    if (!(total > 0))
        throw NumericError("cannot normalize distribution with mass " + std::to_string(total));
    scale(1.0 / total);
}

void Distribution::prune() {
    entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                  [](const Entry& e) { return e.second == 0.0; }),
                   entries_.end());
}

void Distribution::drop_nonpositive() {
    entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                  [](const Entry& e) { return e.second <= 0.0; }),
                   entries_.end());
}

double max_abs_diff(const Distribution& a, const Distribution& b) {
    double worst = 0;
    auto ia = a.entries().begin();
    auto ib = b.entries().begin();
    while (ia != a.entries().end() || ib != b.entries().end()) {
        double diff;
        if (ib == b.entries().end() ||
            (ia != a.entries().end() && ia->first < ib->first)) {
            diff = std::abs(ia->second);
            ++ia;
        } else if (ia == a.entries().end() || ib->first < ia->first) {
            diff = std::abs(ib->second);
            ++ib;
        } else {
            diff = std::abs(ia->second - ib->second);
            ++ia, ++ib;
        }
        worst = std::max(worst, diff);
    }
    return worst;
}

} // namespace epp
