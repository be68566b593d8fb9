#include "credal/credal_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace credal {

// *******************************************************
// marginal
// *******************************************************

namespace {

constexpr double kProbSumTol = 1e-12;
constexpr double kDistinctTol = 1e-12;

std::string field_msg(const std::string& label, const std::string& what) {
    if (label.empty()) return "marginal: " + what;
    return "marginal '" + label + "': " + what;
}

} // namespace

marginal::marginal(std::vector<numvec> support, std::vector<numvec> generators,
                   std::string label)
    : support_(std::move(support)), generators_(std::move(generators)),
      label_(std::move(label)) {
    if (support_.empty())
        throw invalid_input(field_msg(label_, "support must contain at least one point"));
    dim_ = support_.front().size();
    if (dim_ == 0)
        throw invalid_input(field_msg(label_, "support points must have dimension >= 1"));
    for (std::size_t j = 0; j < support_.size(); j++) {
        if (support_[j].size() != dim_)
            throw invalid_input(field_msg(
                label_, "support point " + std::to_string(j) + " has dimension " +
                            std::to_string(support_[j].size()) + ", expected " +
                            std::to_string(dim_)));
        if (!all_finite(support_[j]))
            throw invalid_input(
                field_msg(label_, "support point " + std::to_string(j) + " is not finite"));
    }
    for (std::size_t a = 0; a < support_.size(); a++)
        for (std::size_t b = a + 1; b < support_.size(); b++)
            if (squared_distance(support_[a], support_[b]) <= kDistinctTol * kDistinctTol)
                throw invalid_input(field_msg(
                    label_, "support points " + std::to_string(a) + " and " +
                                std::to_string(b) + " coincide within 1e-12"));

    if (generators_.empty())
        throw invalid_input(field_msg(label_, "at least one generator is required"));
    for (std::size_t k = 0; k < generators_.size(); k++) {
        const numvec& p = generators_[k];
        if (p.size() != support_.size())
            throw invalid_input(field_msg(
                label_, "generator " + std::to_string(k) + " has length " +
                            std::to_string(p.size()) + ", expected " +
                            std::to_string(support_.size())));
        double sum = 0.0;
        for (std::size_t j = 0; j < p.size(); j++) {
            if (!std::isfinite(p[j]) || p[j] < 0.0)
                throw invalid_input(field_msg(
                    label_, "generator " + std::to_string(k) + " entry " +
                                std::to_string(j) + " must be finite and >= 0"));
            sum += p[j];
        }
        if (std::abs(sum - 1.0) > kProbSumTol)
            throw invalid_input(field_msg(
                label_, "generator " + std::to_string(k) + " sums to " +
                            std::to_string(sum) + ", not 1 within 1e-12"));
    }
}

numvec marginal::generator_mean(std::size_t k) const {
    const numvec& p = generators_.at(k);
    numvec mean(dim_, 0.0);
    for (std::size_t j = 0; j < support_.size(); j++)
        for (std::size_t c = 0; c < dim_; c++)
            mean[c] += p[j] * support_[j][c];
    return mean;
}

double marginal::generator_second_moment(std::size_t k) const {
    const numvec& p = generators_.at(k);
    double s = 0.0;
    for (std::size_t j = 0; j < support_.size(); j++)
        s += p[j] * squared_norm(support_[j]);
    return s;
}

// *******************************************************
// sequence and path space
// *******************************************************

sequence::sequence(std::vector<marginal> marginals) : marginals_(std::move(marginals)) {
    if (marginals_.empty())
        throw invalid_input("sequence: at least one marginal is required");
    const std::size_t d = marginals_.front().dimension();
    for (std::size_t i = 1; i < marginals_.size(); i++)
        if (marginals_[i].dimension() != d)
            throw invalid_input("sequence: marginal " + std::to_string(i) +
                                " has dimension " +
                                std::to_string(marginals_[i].dimension()) +
                                ", expected " + std::to_string(d));
}

double sequence::path_count() const {
    double total = 1.0;
    for (const marginal& m : marginals_)
        total *= double(m.support_size());
    return total;
}

path_space::path_space(const sequence& seq, double limit) {
    const double count = seq.path_count();
    if (count > limit)
        throw budget_exceeded("path count " + std::to_string(std::uint64_t(count)) +
                                  " exceeds enumeration budget " +
                                  std::to_string(std::uint64_t(limit)),
                              count, limit);
    radices_.reserve(seq.size());
    prefix_counts_.reserve(seq.size());
    std::size_t running = 1;
    for (std::size_t i = 0; i < seq.size(); i++) {
        prefix_counts_.push_back(running);
        radices_.push_back(seq.at(i).support_size());
        running *= radices_.back();
    }
    total_ = running;
}

indexvec path_space::decode(std::size_t path_id) const {
    assert(path_id < total_);
    indexvec out(radices_.size());
    for (std::size_t i = radices_.size(); i-- > 0;) {
        out[i] = path_id % radices_[i];
        path_id /= radices_[i];
    }
    return out;
}

std::size_t path_space::prefix_id(std::span<const std::size_t> indices,
                                  std::size_t level) const {
    assert(level <= radices_.size() && indices.size() >= level);
    std::size_t id = 0;
    for (std::size_t l = 0; l < level; l++) {
        assert(indices[l] < radices_[l]);
        id = id * radices_[l] + indices[l];
    }
    return id;
}

// *******************************************************
// path functions
// *******************************************************

path_function path_function::from_points(point_fn f) {
    path_function pf;
    pf.point_fn_ = std::move(f);
    return pf;
}

path_function path_function::from_indices(index_fn f) {
    path_function pf;
    pf.index_fn_ = std::move(f);
    return pf;
}

path_function path_function::from_table(numvec values) {
    path_function pf;
    pf.table_ = std::move(values);
    pf.tabular_ = true;
    return pf;
}

numvec path_function::tabulate(const sequence& seq, const path_space& paths) const {
    const std::size_t total = paths.path_count();
    if (tabular_) {
        if (table_.size() != total)
            throw invalid_input("path table has " + std::to_string(table_.size()) +
                                " entries, expected " + std::to_string(total));
        for (std::size_t id = 0; id < total; id++)
            if (!std::isfinite(table_[id]))
                throw invalid_input("path function is not finite at path " +
                                    std::to_string(id));
        return table_;
    }

    const std::size_t n = seq.size();
    numvec out(total);
    indexvec idx(n, 0);
    std::vector<numvec> points(n);
    for (std::size_t i = 0; i < n; i++)
        points[i] = seq.at(i).support()[0];

    for (std::size_t id = 0; id < total; id++) {
        double v;
        if (index_fn_)
            v = index_fn_(idx);
        else
            v = point_fn_(points);
        if (!std::isfinite(v))
            throw invalid_input("path function is not finite at path " +
                                std::to_string(id));
        out[id] = v;

        // odometer step: rightmost level moves fastest
        for (std::size_t i = n; i-- > 0;) {
            if (++idx[i] < paths.radix(i)) {
                points[i] = seq.at(i).support()[idx[i]];
                break;
            }
            idx[i] = 0;
            points[i] = seq.at(i).support()[0];
        }
    }
    return out;
}

// *******************************************************
// upper expectation and products
// *******************************************************

upper_expectation_result upper_expectation(const marginal& m, const numvec& values) {
    if (values.size() != m.support_size())
        throw invalid_input("upper_expectation: got " + std::to_string(values.size()) +
                            " values for " + std::to_string(m.support_size()) +
                            " support points");
    for (std::size_t j = 0; j < values.size(); j++)
        if (!std::isfinite(values[j]))
            throw invalid_input("upper_expectation: value at support point " +
                                std::to_string(j) + " is not finite");

    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t k = 0; k < m.generator_count(); k++) {
        const double v = dot(m.generators()[k], values);
        if (v > best) {
            best = v;
            arg = k;
        }
    }
    return {best, arg};
}

upper_expectation_result upper_expectation(const marginal& m,
                                           const std::function<double(const numvec&)>& f) {
    numvec values(m.support_size());
    for (std::size_t j = 0; j < m.support_size(); j++)
        values[j] = f(m.support()[j]);
    return upper_expectation(m, values);
}

double product_expectation_table(const sequence& seq, const path_space& paths,
                                 const numvec& table) {
    if (table.size() != paths.path_count())
        throw invalid_input("product_expectation_table: table has " +
                            std::to_string(table.size()) + " entries for " +
                            std::to_string(paths.path_count()) + " paths");
    numvec values = table;
    // fold the last coordinate first, then recurse toward the root
    for (std::size_t i = seq.size(); i-- > 0;) {
        const marginal& m = seq.at(i);
        const std::size_t blocks = values.size() / m.support_size();
        numvec folded(blocks);
        numvec slice(m.support_size());
        for (std::size_t b = 0; b < blocks; b++) {
            std::copy_n(values.begin() + long(b * m.support_size()), m.support_size(),
                        slice.begin());
            folded[b] = upper_expectation(m, slice).value;
        }
        values = std::move(folded);
    }
    assert(values.size() == 1);
    return values[0];
}

double product_expectation(const sequence& seq, const path_function& f,
                           const eval_options& opts) {
    const path_space paths(seq, opts.limits.paths);
    return product_expectation_table(seq, paths, f.tabulate(seq, paths));
}

// *******************************************************
// adapted selections
// *******************************************************

namespace {

void validate_selection(const sequence& seq, const path_space& paths,
                        const adapted_selection& sel) {
    if (sel.choice.size() != seq.size())
        throw invalid_input("selection covers " + std::to_string(sel.choice.size()) +
                            " levels, expected " + std::to_string(seq.size()));
    for (std::size_t i = 0; i < seq.size(); i++) {
        if (sel.choice[i].size() != paths.prefix_count(i))
            throw invalid_input("selection level " + std::to_string(i) + " has " +
                                std::to_string(sel.choice[i].size()) +
                                " nodes, expected " +
                                std::to_string(paths.prefix_count(i)));
        for (std::size_t q = 0; q < sel.choice[i].size(); q++)
            if (sel.choice[i][q] >= seq.at(i).generator_count())
                throw invalid_input("selection level " + std::to_string(i) + " node " +
                                    std::to_string(q) + " picks generator " +
                                    std::to_string(sel.choice[i][q]) + " of " +
                                    std::to_string(seq.at(i).generator_count()));
    }
}

/// Depth-first accumulation of sum over paths of P(path) * table[path].
double selection_path_sum(const sequence& seq, const path_space& paths,
                          const adapted_selection& sel, const numvec& table,
                          std::size_t level, std::size_t prefix, double prob) {
    if (level == seq.size())
        return prob * table[prefix];
    const marginal& m = seq.at(level);
    const numvec& gen = m.generators()[sel.choice[level][prefix]];
    double sum = 0.0;
    for (std::size_t j = 0; j < m.support_size(); j++) {
        if (gen[j] == 0.0) continue;
        sum += selection_path_sum(seq, paths, sel, table, level + 1,
                                  prefix * m.support_size() + j, prob * gen[j]);
    }
    return sum;
}

} // namespace

adapted_selection_enumerator::adapted_selection_enumerator(const sequence& seq,
                                                           const eval_options& opts) {
    const path_space paths(seq, opts.limits.paths);
    count_ = 1.0;
    digits_.resize(seq.size());
    node_radix_.resize(seq.size());
    for (std::size_t i = 0; i < seq.size(); i++) {
        node_radix_[i] = seq.at(i).generator_count();
        digits_[i].assign(paths.prefix_count(i), 0);
        count_ *= std::pow(double(node_radix_[i]), double(paths.prefix_count(i)));
    }
    if (!(count_ <= opts.limits.selections))
        throw budget_exceeded("adapted selection count " + std::to_string(count_) +
                                  " exceeds oracle budget " +
                                  std::to_string(opts.limits.selections),
                              count_, opts.limits.selections);
}

std::optional<adapted_selection> adapted_selection_enumerator::next() {
    if (done_) return std::nullopt;
    if (first_) {
        first_ = false;
        return adapted_selection{digits_};
    }
    // odometer over all nodes, deepest level fastest
    for (std::size_t i = digits_.size(); i-- > 0;) {
        for (std::size_t q = digits_[i].size(); q-- > 0;) {
            if (++digits_[i][q] < node_radix_[i])
                return adapted_selection{digits_};
            digits_[i][q] = 0;
        }
    }
    done_ = true;
    return std::nullopt;
}

double expectation_under(const sequence& seq, const adapted_selection& sel,
                         const path_function& f, const eval_options& opts) {
    const path_space paths(seq, opts.limits.paths);
    validate_selection(seq, paths, sel);
    const numvec table = f.tabulate(seq, paths);
    return selection_path_sum(seq, paths, sel, table, 0, 0, 1.0);
}

double selection_total_mass(const sequence& seq, const adapted_selection& sel,
                            const eval_options& opts) {
    const path_space paths(seq, opts.limits.paths);
    validate_selection(seq, paths, sel);
    const numvec ones(paths.path_count(), 1.0);
    return selection_path_sum(seq, paths, sel, ones, 0, 0, 1.0);
}

numvec conditional_mean(const sequence& seq, const adapted_selection& sel,
                        std::size_t level, std::span<const std::size_t> prefix) {
    if (level >= seq.size())
        throw index_error("conditional_mean: level " + std::to_string(level) +
                          " out of range for n = " + std::to_string(seq.size()));
    if (prefix.size() < level)
        throw index_error("conditional_mean: prefix of length " +
                          std::to_string(prefix.size()) + " is too short for level " +
                          std::to_string(level));
    std::size_t id = 0;
    for (std::size_t l = 0; l < level; l++) {
        if (prefix[l] >= seq.at(l).support_size())
            throw index_error("conditional_mean: prefix index " +
                              std::to_string(prefix[l]) + " out of range at level " +
                              std::to_string(l));
        id = id * seq.at(l).support_size() + prefix[l];
    }
    if (sel.choice.size() != seq.size() || id >= sel.choice[level].size())
        throw index_error("conditional_mean: selection does not cover the node");
    return seq.at(level).generator_mean(sel.choice[level][id]);
}

} // namespace credal
