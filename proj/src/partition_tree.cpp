#include "adastrat/partition_tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "adastrat/errors.hpp"
#include "adastrat/stats.hpp"

namespace adastrat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTolerance = 1e-12;
constexpr int kMaxDepth = 62;

struct Node {
    Rectangle rect;
    std::vector<std::uint32_t> members;
};

void check_batch(const SampleBatch& batch) {
    if (batch.dim == 0) throw ArgumentError("SampleBatch: dimension must be at least 1");
    if (batch.coords.size() != batch.size() * batch.dim)
        throw ArgumentError("SampleBatch: coords size does not match values size times dimension");
}

// Route a parent's members to the two children by containment.
std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> route(const SampleBatch& batch,
                                                                          const std::vector<std::uint32_t>& members,
                                                                          const SplitPair& split) {
    std::vector<std::uint32_t> minus, plus;
    minus.reserve(members.size());
    plus.reserve(members.size());
    for (std::uint32_t i : members) {
        const auto x = batch.point(i);
        if (contains(split.minus, x))
            minus.push_back(i);
        else if (contains(split.plus, x))
            plus.push_back(i);
        else
            throw std::logic_error("routing: point outside both children");
    }
    return {std::move(minus), std::move(plus)};
}

std::vector<std::uint32_t> all_members(const SampleBatch& batch) {
    std::vector<std::uint32_t> members(batch.size());
    for (std::size_t i = 0; i < members.size(); ++i) members[i] = static_cast<std::uint32_t>(i);
    return members;
}

double midpoint_criterion(const SampleBatch& batch, const std::vector<std::uint32_t>& members, const Rectangle& r,
                          std::size_t axis) {
    const double mid = 0.5 * (r.lower(axis) + r.upper(axis));
    MomentAccumulator minus, plus;
    for (std::uint32_t i : members) {
        if (batch.coords[i * batch.dim + axis] < mid)
            minus.add(batch.values[i]);
        else
            plus.add(batch.values[i]);
    }
    return 0.5 * plus.variance() + 0.5 * minus.variance();
}

double weighted(std::uint64_t n_plus, std::uint64_t n_r, const MomentAccumulator& minus,
                const MomentAccumulator& plus) {
    if (minus.count <= 1 || plus.count <= 1) return kInf;
    const double w_plus = static_cast<double>(n_plus) / static_cast<double>(n_r);
    const double w_minus = static_cast<double>(n_r - n_plus) / static_cast<double>(n_r);
    return w_plus * plus.variance() + w_minus * minus.variance();
}

}  // namespace

void SampleBatch::push_back(std::span<const double> x, double y) {
    if (x.size() != dim) throw ArgumentError("SampleBatch::push_back: point has wrong dimension");
    coords.insert(coords.end(), x.begin(), x.end());
    values.push_back(y);
}

Fraction Partition::total_volume() const {
    Fraction sum{0, 1};
    for (const auto& leaf : leaves) sum = sum + leaf.exact_volume();
    return sum;
}

Choice pick_minimizer(std::span<const double> criteria, Rng& rng) {
    if (criteria.empty()) throw ArgumentError("pick_minimizer: no candidates");
    const double best = *std::min_element(criteria.begin(), criteria.end());
    std::vector<std::size_t> tied;
    if (std::isinf(best)) {
        tied.resize(criteria.size());
        for (std::size_t i = 0; i < tied.size(); ++i) tied[i] = i;
    } else {
        const double threshold = best + kTieTolerance * std::abs(best);
        for (std::size_t i = 0; i < criteria.size(); ++i)
            if (criteria[i] <= threshold) tied.push_back(i);
    }
    if (tied.size() == 1) return {tied.front(), false};
    return {tied[rng.index(tied.size())], true};
}

double cart_criterion(const SampleBatch& batch_in_r, const Rectangle& r, std::size_t axis) {
    check_batch(batch_in_r);
    if (axis >= r.dim()) throw ArgumentError("cart_criterion: axis out of range");
    return midpoint_criterion(batch_in_r, all_members(batch_in_r), r, axis);
}

double rational_criterion(const SampleBatch& batch_in_r, const Rectangle& r, std::size_t axis, std::uint64_t n_plus) {
    check_batch(batch_in_r);
    const SplitPair split = split_frac(r, axis, n_plus);
    MomentAccumulator minus, plus;
    for (std::size_t i = 0; i < batch_in_r.size(); ++i) {
        if (contains(split.minus, batch_in_r.point(i)))
            minus.add(batch_in_r.values[i]);
        else
            plus.add(batch_in_r.values[i]);
    }
    return weighted(n_plus, r.volume_numerator(), minus, plus);
}

Partition grow_pow2(const SampleBatch& batch, int depth, Rng& rng) {
    check_batch(batch);
    if (batch.size() == 0) throw ArgumentError("grow_pow2: empty batch");
    if (depth < 0 || depth > kMaxDepth)
        throw ArgumentError("grow_pow2: depth must lie in [0, " + std::to_string(kMaxDepth) + "]");

    Partition out;
    out.dim = batch.dim;
    out.mode = PartitionMode::pow2;
    out.depth = depth;

    std::vector<Node> level;
    level.push_back(Node{Rectangle::unit(batch.dim), all_members(batch)});
    std::vector<double> criteria(batch.dim);

    for (int l = 0; l < depth; ++l) {
        std::vector<Node> next;
        next.reserve(level.size() * 2);
        for (Node& node : level) {
            for (std::size_t j = 0; j < batch.dim; ++j)
                criteria[j] = midpoint_criterion(batch, node.members, node.rect, j);
            const Choice choice = pick_minimizer(criteria, rng);
            out.decisions.push_back(SplitDecision{choice.index, 0, criteria[choice.index], choice.tiebreak});

            SplitPair split = split_mid(node.rect, choice.index);
            auto [minus, plus] = route(batch, node.members, split);
            next.push_back(Node{std::move(split.minus), std::move(minus)});
            next.push_back(Node{std::move(split.plus), std::move(plus)});
        }
        level = std::move(next);
    }

    out.leaves.reserve(level.size());
    for (Node& node : level) out.leaves.push_back(std::move(node.rect));
    return out;
}

Partition grow_rational(const SampleBatch& batch, std::uint64_t total, Rng& rng) {
    check_batch(batch);
    if (total < 1) throw ArgumentError("grow_rational: total must be at least 1");
    if (batch.size() != total) throw ArgumentError("grow_rational: batch must hold exactly `total` points");

    Partition out;
    out.dim = batch.dim;
    out.mode = PartitionMode::rational;

    std::deque<Node> queue;
    queue.push_back(Node{Rectangle::unit(batch.dim, total), all_members(batch)});

    std::vector<double> criteria;
    std::vector<std::pair<double, double>> sorted;  // (coordinate, value)
    std::vector<MomentAccumulator> prefix, suffix;

    while (!queue.empty()) {
        Node node = std::move(queue.front());
        queue.pop_front();
        const std::uint64_t n_r = node.rect.volume_numerator();
        if (n_r == 1) {
            out.leaves.push_back(std::move(node.rect));
            continue;
        }

        // criteria laid out as [axis][n_minus - 1]
        const std::size_t per_axis = n_r - 1;
        criteria.assign(batch.dim * per_axis, kInf);
        const std::size_t m = node.members.size();
        for (std::size_t j = 0; j < batch.dim; ++j) {
            sorted.clear();
            for (std::uint32_t i : node.members) sorted.emplace_back(batch.coords[i * batch.dim + j], batch.values[i]);
            std::sort(sorted.begin(), sorted.end());

            prefix.assign(m + 1, MomentAccumulator{});
            suffix.assign(m + 1, MomentAccumulator{});
            for (std::size_t t = 0; t < m; ++t) {
                prefix[t + 1] = prefix[t];
                prefix[t + 1].add(sorted[t].second);
            }
            for (std::size_t t = m; t-- > 0;) {
                suffix[t] = suffix[t + 1];
                suffix[t].add(sorted[t].second);
            }

            std::size_t below = 0;
            for (std::uint64_t n_minus = 1; n_minus < n_r; ++n_minus) {
                const double cut = frac_cut_point(node.rect, j, n_minus);
                while (below < m && sorted[below].first < cut) ++below;
                criteria[j * per_axis + (n_minus - 1)] = weighted(n_r - n_minus, n_r, prefix[below], suffix[below]);
            }
        }

        const Choice choice = pick_minimizer(criteria, rng);
        const std::size_t axis = choice.index / per_axis;
        const std::uint64_t n_minus = choice.index % per_axis + 1;
        const std::uint64_t n_plus = n_r - n_minus;
        out.decisions.push_back(SplitDecision{axis, n_plus, criteria[choice.index], choice.tiebreak});

        SplitPair split = split_frac(node.rect, axis, n_plus);
        auto [minus, plus] = route(batch, node.members, split);
        queue.push_back(Node{std::move(split.minus), std::move(minus)});
        queue.push_back(Node{std::move(split.plus), std::move(plus)});
    }
    return out;
}

void write_partition(std::ostream& os, const Partition& partition) {
    std::ostringstream buf;
    buf.precision(17);
    buf << "adastrat-partition 1\n";
    buf << "mode " << (partition.mode == PartitionMode::pow2 ? "pow2" : "rational") << '\n';
    buf << "dim " << partition.dim << '\n';
    buf << "depth ";
    if (partition.depth)
        buf << *partition.depth;
    else
        buf << '-';
    buf << '\n';
    buf << "leaves " << partition.leaves.size() << '\n';
    for (const auto& leaf : partition.leaves) {
        buf << leaf.volume_numerator() << ' ' << leaf.volume_denominator();
        for (std::size_t i = 0; i < leaf.dim(); ++i) buf << ' ' << leaf.lower(i) << ' ' << leaf.upper(i);
        buf << '\n';
    }
    os << buf.str();
}

Partition read_partition(std::istream& is) {
    std::size_t line_no = 0;
    std::string line;
    auto next_line = [&]() -> std::istringstream {
        if (!std::getline(is, line)) throw ParseError("partition: unexpected end of input", line_no + 1);
        ++line_no;
        return std::istringstream(line);
    };
    auto expect_key = [&](std::istringstream& ls, const char* key) {
        std::string k;
        ls >> k;
        if (k != key) throw ParseError(std::string("partition: expected '") + key + "'", line_no);
    };

    Partition out;
    {
        auto ls = next_line();
        expect_key(ls, "adastrat-partition");
        int version = 0;
        if (!(ls >> version) || version != 1) throw ParseError("partition: unsupported version", line_no);
    }
    {
        auto ls = next_line();
        expect_key(ls, "mode");
        std::string mode;
        ls >> mode;
        if (mode == "pow2")
            out.mode = PartitionMode::pow2;
        else if (mode == "rational")
            out.mode = PartitionMode::rational;
        else
            throw ParseError("partition: unknown mode '" + mode + "'", line_no);
    }
    {
        auto ls = next_line();
        expect_key(ls, "dim");
        if (!(ls >> out.dim) || out.dim == 0) throw ParseError("partition: bad dim", line_no);
    }
    {
        auto ls = next_line();
        expect_key(ls, "depth");
        std::string d;
        ls >> d;
        if (d != "-") {
            try {
                out.depth = std::stoi(d);
            } catch (const std::exception&) {
                throw ParseError("partition: bad depth", line_no);
            }
        }
    }
    std::size_t count = 0;
    {
        auto ls = next_line();
        expect_key(ls, "leaves");
        if (!(ls >> count)) throw ParseError("partition: bad leaf count", line_no);
    }
    out.leaves.reserve(count);
    for (std::size_t p = 0; p < count; ++p) {
        auto ls = next_line();
        std::uint64_t num = 0, den = 0;
        std::vector<double> lo(out.dim), hi(out.dim);
        if (!(ls >> num >> den)) throw ParseError("partition: bad leaf volume", line_no);
        for (std::size_t i = 0; i < out.dim; ++i)
            if (!(ls >> lo[i] >> hi[i])) throw ParseError("partition: bad leaf coordinates", line_no);
        try {
            out.leaves.emplace_back(std::move(lo), std::move(hi), num, den);
        } catch (const ArgumentError& e) {
            throw ParseError(std::string("partition: ") + e.what(), line_no);
        }
    }
    return out;
}

}  // namespace adastrat
