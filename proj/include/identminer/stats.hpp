#ifndef IDENTMINER_STATS_HPP
#define IDENTMINER_STATS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core.hpp"
#include "resources.hpp"

/**
 * @file stats.hpp
 * @brief Rank tests, rank correlation and annotation agreement.
 */

namespace identminer {

struct MannWhitneyResult {
    /** U statistic of the first sample: pairs (a, b) with a > b, plus half the ties. */
    double u = 0;
    double z = 0;
    /** Two-sided p-value from the tie-corrected normal approximation with continuity correction. */
    double p = 1;
};

namespace internal {

/** 1-based midranks of `values`. */
inline std::vector<double> midranks(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = r;
        }
        i = j + 1;
    }
    return ranks;
}

}

/**
 * Mann-Whitney U test. Throws `std::invalid_argument` if a sample is empty, contains NaN, or if every value is
 * identical (zero variance).
 */
inline MannWhitneyResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("Mann-Whitney U needs two non-empty samples");
    }
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    for (auto v : pooled) {
        if (std::isnan(v)) {
            throw std::invalid_argument("Mann-Whitney U sample contains NaN");
        }
    }
    auto ranks = internal::midranks(pooled);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double n = na + nb;
    double rank_sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        rank_sum += ranks[i];
    }

    std::sort(pooled.begin(), pooled.end());
    double tie_term = 0;
    for (std::size_t i = 0; i < pooled.size();) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j] == pooled[i]) {
            ++j;
        }
        double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double variance = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (!(variance > 0)) {
        throw std::invalid_argument("Mann-Whitney U is undefined when all values are identical");
    }

    MannWhitneyResult r;
    r.u = rank_sum - na * (na + 1.0) / 2.0;
    const double mu = na * nb / 2.0;
    const double big = std::max(r.u, na * nb - r.u);
    r.z = (big - mu - 0.5) / std::sqrt(variance);
    r.p = std::min(1.0, std::erfc(r.z / std::sqrt(2.0)));
    return r;
}

/** Kendall tau-b of two paired samples in O(n log n). Returns 1 for identical inputs whose tau-b is undefined, 0 otherwise. */
inline double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("Kendall tau needs paired samples of equal length");
    }
    const std::size_t n = x.size();
    std::vector<std::pair<double, double> > pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = {x[i], y[i]};
    }
    std::sort(pts.begin(), pts.end());

    const std::int64_t n0 = static_cast<std::int64_t>(n) * (static_cast<std::int64_t>(n) - 1) / 2;
    std::int64_t n1 = 0, n3 = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && pts[j].first == pts[i].first) {
            ++j;
        }
        std::int64_t t = static_cast<std::int64_t>(j - i);
        n1 += t * (t - 1) / 2;
        for (std::size_t k = i; k < j;) {
            std::size_t l = k;
            while (l < j && pts[l].second == pts[k].second) {
                ++l;
            }
            std::int64_t u = static_cast<std::int64_t>(l - k);
            n3 += u * (u - 1) / 2;
            k = l;
        }
        i = j;
    }

    std::vector<double> ys(n), buf(n);
    for (std::size_t i = 0; i < n; ++i) {
        ys[i] = pts[i].second;
    }
    // Bottom-up merge sort on the y values counting strict inversions.
    std::int64_t swaps = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo < n; lo += 2 * width) {
            std::size_t mid = std::min(lo + width, n), hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (ys[j] < ys[i]) {
                    swaps += static_cast<std::int64_t>(mid - i);
                    buf[k++] = ys[j++];
                } else {
                    buf[k++] = ys[i++];
                }
            }
            while (i < mid) {
                buf[k++] = ys[i++];
            }
            while (j < hi) {
                buf[k++] = ys[j++];
            }
        }
        std::swap(ys, buf);
    }

    std::int64_t n2 = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && ys[j] == ys[i]) {
            ++j;
        }
        std::int64_t t = static_cast<std::int64_t>(j - i);
        n2 += t * (t - 1) / 2;
        i = j;
    }

    const double denom = std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
    if (denom == 0) {
        return x == y ? 1.0 : 0.0;
    }
    return static_cast<double>(n0 - n1 - n2 + n3 - 2 * swaps) / denom;
}

/**
 * Kendall tau-b between the top-`k` prefixes of two ranked lists. The union of both prefixes is ranked by position,
 * with items missing from a prefix tied at rank k+1. Throws `std::invalid_argument` on duplicates or k = 0.
 */
inline double kendall_tau_top_k(const std::vector<std::string>& a, const std::vector<std::string>& b, std::size_t k) {
    if (k == 0) {
        throw std::invalid_argument("k must be positive");
    }
    std::map<std::string, std::pair<double, double> > ranks;
    const double absent = static_cast<double>(k) + 1.0;
    auto place = [&](const std::vector<std::string>& list, bool first) {
        std::size_t limit = std::min(k, list.size());
        for (std::size_t i = 0; i < limit; ++i) {
            auto it = ranks.try_emplace(list[i], absent, absent).first;
            double& slot = first ? it->second.first : it->second.second;
            if (slot != absent) {
                throw std::invalid_argument("ranked list contains duplicate item '" + list[i] + "'");
            }
            slot = static_cast<double>(i + 1);
        }
    };
    place(a, true);
    place(b, false);
    std::vector<double> x, y;
    for (const auto& [item, r] : ranks) {
        x.push_back(r.first);
        y.push_back(r.second);
    }
    return kendall_tau_b(x, y);
}

/**
 * Krippendorff's alpha for nominal data. `units[u][j]` is annotator j's category for unit u, or nullopt when missing.
 * Units with fewer than two values are not pairable and are ignored. Returns 1 when observed disagreement is 0.
 * Throws `std::invalid_argument` for fewer than two annotators or no pairable unit.
 */
inline double krippendorff_alpha_nominal(const std::vector<std::vector<std::optional<int> > >& units) {
    if (units.empty()) {
        throw std::invalid_argument("annotation set has no items");
    }
    std::size_t annotators = 0;
    for (const auto& u : units) {
        annotators = std::max(annotators, u.size());
    }
    if (annotators < 2) {
        throw std::invalid_argument("annotation set needs at least two annotators");
    }
    std::map<std::pair<int, int>, double> coincidence;
    std::map<int, double> marginal;
    double total = 0;
    for (const auto& u : units) {
        std::map<int, double> counts;
        double m = 0;
        for (const auto& v : u) {
            if (v) {
                counts[*v] += 1;
                m += 1;
            }
        }
        if (m < 2) {
            continue;
        }
        for (const auto& [c, nc] : counts) {
            for (const auto& [k, nk] : counts) {
                double pairs = c == k ? nc * (nc - 1) : nc * nk;
                coincidence[{c, k}] += pairs / (m - 1);
            }
            marginal[c] += nc;
        }
        total += m;
    }
    if (total == 0) {
        throw std::invalid_argument("annotation set has no unit with two or more values");
    }
    double disagree = 0;
    for (const auto& [ck, o] : coincidence) {
        if (ck.first != ck.second) {
            disagree += o;
        }
    }
    if (disagree == 0) {
        return 1.0;
    }
    double expected = total * total;
    for (const auto& [c, nc] : marginal) {
        expected -= nc * nc;
    }
    const double observed_d = disagree / total;
    const double expected_d = expected / (total * (total - 1));
    return 1.0 - observed_d / expected_d;
}

enum class Annotation : std::uint8_t { yes, no, unsure };

inline std::string_view to_string(Annotation a) {
    switch (a) {
        case Annotation::yes: return "yes";
        case Annotation::no: return "no";
        case Annotation::unsure: return "unsure";
    }
    return "?";
}

inline Annotation parse_annotation(std::string_view s) {
    auto t = internal::ascii_lower(internal::trim(s));
    if (t == "yes") {
        return Annotation::yes;
    }
    if (t == "no") {
        return Annotation::no;
    }
    if (t == "unsure") {
        return Annotation::unsure;
    }
    throw std::invalid_argument("unknown annotation '" + std::string(s) + "'");
}

/** Items by annotators; a missing judgement is nullopt. */
class AnnotationSet {
public:
    AnnotationSet(std::vector<std::string> items, std::vector<std::string> annotators) : my_items(std::move(items)), my_annotators(std::move(annotators)) {
        if (my_annotators.size() < 2) {
            throw std::invalid_argument("annotation set needs at least two annotators");
        }
        if (my_items.empty()) {
            throw std::invalid_argument("annotation set needs at least one item");
        }
        my_cells.assign(my_items.size(), std::vector<std::optional<Annotation> >(my_annotators.size()));
    }

    const std::vector<std::string>& items() const {
        return my_items;
    }

    const std::vector<std::string>& annotators() const {
        return my_annotators;
    }

    std::optional<Annotation>& at(std::size_t item, std::size_t annotator) {
        return my_cells.at(item).at(annotator);
    }

    const std::optional<Annotation>& at(std::size_t item, std::size_t annotator) const {
        return my_cells.at(item).at(annotator);
    }

    const std::vector<std::optional<Annotation> >& row(std::size_t item) const {
        return my_cells.at(item);
    }

    std::vector<std::vector<std::optional<int> > > as_units() const {
        std::vector<std::vector<std::optional<int> > > out;
        for (const auto& row : my_cells) {
            std::vector<std::optional<int> > u;
            for (const auto& v : row) {
                u.push_back(v ? std::optional<int>(static_cast<int>(*v)) : std::nullopt);
            }
            out.push_back(std::move(u));
        }
        return out;
    }

private:
    std::vector<std::string> my_items;
    std::vector<std::string> my_annotators;
    std::vector<std::vector<std::optional<Annotation> > > my_cells;
};

inline double krippendorff_alpha_nominal(const AnnotationSet& set) {
    return krippendorff_alpha_nominal(set.as_units());
}

/**
 * Read "item<TAB>yes|no|unsure<TAB>annotator" rows. Items and annotators keep first-appearance order.
 * Throws `DataError` on malformed rows or a repeated (item, annotator) pair.
 */
inline AnnotationSet read_annotations(std::istream& in) {
    struct Row {
        std::string item, annotator;
        Annotation value;
    };
    std::vector<Row> rows;
    std::vector<std::string> items, annotators;
    std::map<std::string, std::size_t> item_index, annotator_index;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = internal::trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        auto fields = internal::split(t, '\t');
        if (fields.size() != 3) {
            throw DataError("annotations line " + std::to_string(lineno) + ": expected 3 tab-separated fields");
        }
        Row r;
        r.item = std::string(internal::trim(fields[0]));
        r.annotator = std::string(internal::trim(fields[2]));
        try {
            r.value = parse_annotation(fields[1]);
        } catch (const std::invalid_argument& e) {
            throw DataError("annotations line " + std::to_string(lineno) + ": " + e.what());
        }
        if (item_index.emplace(r.item, items.size()).second) {
            items.push_back(r.item);
        }
        if (annotator_index.emplace(r.annotator, annotators.size()).second) {
            annotators.push_back(r.annotator);
        }
        rows.push_back(std::move(r));
    }
    if (items.empty()) {
        throw DataError("annotation file has no rows");
    }
    if (annotators.size() < 2) {
        throw DataError("annotation file needs at least two annotators");
    }
    AnnotationSet set(items, annotators);
    for (const auto& r : rows) {
        auto& cell = set.at(item_index.at(r.item), annotator_index.at(r.annotator));
        if (cell) {
            throw DataError("annotator '" + r.annotator + "' labels item '" + r.item + "' twice");
        }
        cell = r.value;
    }
    return set;
}

inline AnnotationSet load_annotations(const std::string& path) {
    auto in = internal::open_input(path);
    return read_annotations(in);
}

enum class Vote : std::uint8_t { yes, no, discard };

inline std::string_view to_string(Vote v) {
    switch (v) {
        case Vote::yes: return "yes";
        case Vote::no: return "no";
        case Vote::discard: return "discard";
    }
    return "?";
}

/** Strict majority of the judgements given; a majority of "unsure", no strict majority, or no judgement discards the item. */
inline Vote majority_vote(const std::vector<std::optional<Annotation> >& votes) {
    std::array<std::size_t, 3> counts{};
    std::size_t n = 0;
    for (const auto& v : votes) {
        if (v) {
            ++counts[static_cast<std::size_t>(*v)];
            ++n;
        }
    }
    if (2 * counts[0] > n) {
        return Vote::yes;
    }
    if (2 * counts[1] > n) {
        return Vote::no;
    }
    return Vote::discard;
}

inline Vote majority_vote(const std::vector<Annotation>& votes) {
    return majority_vote(std::vector<std::optional<Annotation> >(votes.begin(), votes.end()));
}

/** Majority-vote label of every item that is not discarded, keyed by item. */
inline std::map<std::string, bool> majority_labels(const AnnotationSet& set) {
    std::map<std::string, bool> out;
    for (std::size_t i = 0; i < set.items().size(); ++i) {
        auto v = majority_vote(set.row(i));
        if (v != Vote::discard) {
            out[set.items()[i]] = v == Vote::yes;
        }
    }
    return out;
}

}

#endif
