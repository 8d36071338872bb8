#pragma once

#include <algorithm>
#include <compare>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "zbias/rational.hpp"

namespace zbias {

/// A box of a Young diagram, 1-indexed: row 1 is the top row, column 1 the
/// leftmost column.
struct Box {
    int row = 1;
    int col = 1;
    friend auto operator<=>(const Box&, const Box&) = default;
};

/// An integer partition: weakly decreasing positive parts. The empty
/// partition is the unique partition of 0 and is a first-class value (growth
/// processes start from it). Immutable after construction.
class Partition {
public:
    Partition() = default;

    explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (parts_[i] < 1) throw std::invalid_argument("Partition: parts must be positive");
            if (i > 0 && parts_[i - 1] < parts_[i])
                throw std::invalid_argument("Partition: parts must be weakly decreasing");
        }
    }

    Partition(std::initializer_list<int> parts) : Partition(std::vector<int>(parts)) {}

    const std::vector<int>& parts() const { return parts_; }
    int rows() const { return static_cast<int>(parts_.size()); }
    int size() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }
    bool empty() const { return parts_.empty(); }

    /// 1-indexed row length; rows beyond the diagram have length 0.
    int row_length(int row) const {
        return (row >= 1 && row <= rows()) ? parts_[row - 1] : 0;
    }

    bool contains(Box x) const { return x.row >= 1 && x.col >= 1 && x.col <= row_length(x.row); }

    std::vector<Box> boxes() const {
        std::vector<Box> out;
        out.reserve(static_cast<std::size_t>(size()));
        for (int r = 1; r <= rows(); ++r)
            for (int c = 1; c <= parts_[r - 1]; ++c) out.push_back({r, c});
        return out;
    }

    /// Serializes as a comma-separated part list, e.g. "3,2"; empty partition
    /// serializes as "".
    std::string to_string() const {
        std::string s;
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(parts_[i]);
        }
        return s;
    }

    static Partition from_string(std::string_view s) {
        std::vector<int> parts;
        std::size_t pos = 0;
        while (pos < s.size()) {
            std::size_t comma = s.find(',', pos);
            if (comma == std::string_view::npos) comma = s.size();
            parts.push_back(std::stoi(std::string(s.substr(pos, comma - pos))));
            pos = comma + 1;
        }
        return Partition(std::move(parts));
    }

    friend auto operator<=>(const Partition&, const Partition&) = default;

private:
    std::vector<int> parts_;
};

struct ArmLeg {
    int arm = 0;
    int leg = 0;
};

/// Arm = boxes strictly right of x in its row; leg = boxes strictly below x
/// in its column. Throws if x is not a box of the diagram.
inline ArmLeg arm_leg(const Partition& lambda, Box x) {
    if (!lambda.contains(x)) throw std::out_of_range("arm_leg: box not in diagram");
    const int arm = lambda.row_length(x.row) - x.col;
    int leg = 0;
    for (int r = x.row + 1; lambda.row_length(r) >= x.col; ++r) ++leg;
    return {arm, leg};
}

/// alpha-content of a box: alpha*(col-1) - (row-1).
inline Rational alpha_content(Box x, const Rational& alpha) {
    if (alpha <= 0) throw std::domain_error("alpha_content: alpha must be positive");
    return alpha * (x.col - 1) - (x.row - 1);
}

/// Sum of alpha-contents over the whole diagram, exact in the rational alpha.
inline Rational content_sum(const Partition& lambda, const Rational& alpha) {
    if (alpha <= 0) throw std::domain_error("content_sum: alpha must be positive");
    // sum_x [alpha*(col-1) - (row-1)] row by row
    Rational total = 0;
    const auto& parts = lambda.parts();
    for (int r = 1; r <= lambda.rows(); ++r) {
        const long len = parts[r - 1];
        total += alpha * (len * (len - 1) / 2) - Rational(r - 1) * len;
    }
    return total;
}

inline Partition transpose(const Partition& lambda) {
    if (lambda.empty()) return {};
    std::vector<int> cols(static_cast<std::size_t>(lambda.parts().front()));
    for (int c = 1; c <= lambda.parts().front(); ++c) {
        int h = 0;
        for (int part : lambda.parts()) {
            if (part >= c) ++h;
            else break;
        }
        cols[static_cast<std::size_t>(c - 1)] = h;
    }
    return Partition(std::move(cols));
}

/// Positions where a box may be added keeping a valid diagram. Listed top row
/// first; the new-row position comes last.
inline std::vector<Box> addable_boxes(const Partition& tau) {
    std::vector<Box> out;
    const auto& parts = tau.parts();
    for (int r = 1; r <= tau.rows(); ++r)
        if (r == 1 || parts[r - 1] < parts[r - 2]) out.push_back({r, parts[r - 1] + 1});
    out.push_back({tau.rows() + 1, 1});
    return out;
}

/// Corner boxes that may be removed keeping a valid diagram.
inline std::vector<Box> removable_boxes(const Partition& lambda) {
    std::vector<Box> out;
    const auto& parts = lambda.parts();
    for (int r = 1; r <= lambda.rows(); ++r)
        if (r == lambda.rows() || parts[r - 1] > parts[r]) out.push_back({r, parts[r - 1]});
    return out;
}

inline Partition with_added_box(const Partition& tau, Box x) {
    std::vector<int> parts = tau.parts();
    if (x.row == tau.rows() + 1) {
        if (x.col != 1) throw std::invalid_argument("with_added_box: not an addable position");
        parts.push_back(1);
    } else {
        if (!(x.row >= 1 && x.row <= tau.rows() && x.col == parts[x.row - 1] + 1))
            throw std::invalid_argument("with_added_box: not an addable position");
        ++parts[x.row - 1];
    }
    return Partition(std::move(parts));
}

inline Partition with_removed_box(const Partition& lambda, Box x) {
    std::vector<int> parts = lambda.parts();
    if (!(x.row >= 1 && x.row <= lambda.rows() && x.col == parts[x.row - 1]))
        throw std::invalid_argument("with_removed_box: not a removable corner");
    if (x.row < lambda.rows() && parts[x.row - 1] - 1 < parts[x.row])
        throw std::invalid_argument("with_removed_box: not a removable corner");
    if (--parts[x.row - 1] == 0) parts.pop_back();
    return Partition(std::move(parts));
}

inline std::vector<Partition> addable_corners(const Partition& tau) {
    std::vector<Partition> out;
    for (Box b : addable_boxes(tau)) out.push_back(with_added_box(tau, b));
    return out;
}

inline std::vector<Partition> removable_corners(const Partition& lambda) {
    std::vector<Partition> out;
    for (Box b : removable_boxes(lambda)) out.push_back(with_removed_box(lambda, b));
    return out;
}

namespace detail {
inline void enumerate_rec(int remaining, int max_part, std::vector<int>& prefix,
                          std::vector<Partition>& out) {
    if (remaining == 0) {
        out.emplace_back(prefix);
        return;
    }
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
        prefix.push_back(p);
        enumerate_rec(remaining - p, p, prefix, out);
        prefix.pop_back();
    }
}
}  // namespace detail

/// All partitions of n, each exactly once, in lexicographically descending
/// order of the part sequence ((n) first, (1,...,1) last). n = 0 yields the
/// single empty partition.
inline std::vector<Partition> enumerate_partitions(int n) {
    if (n < 0) throw std::domain_error("enumerate_partitions: n must be nonnegative");
    std::vector<Partition> out;
    std::vector<int> prefix;
    detail::enumerate_rec(n, n == 0 ? 1 : n, prefix, out);
    return out;
}

}  // namespace zbias
