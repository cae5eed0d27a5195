#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace idsolve {

/// Index of a variable inside the model or network that owns it.
using VarId = std::size_t;

/// Outcome index per variable.
using Assignment = std::map<VarId, std::size_t>;

/// What the numbers in a table mean. Products join tags: valuation absorbs
/// everything, then likelihood, then utility, then probability.
enum class Semantics { probability, likelihood, utility, valuation };

Semantics join(Semantics a, Semantics b);

/// Dense table over an ordered list of variables, row-major with the last
/// variable varying fastest.
class Factor {
public:
    Factor() = default;
    Factor(std::vector<VarId> scope, std::vector<std::size_t> cardinalities, std::vector<double> values,
           Semantics semantics = Semantics::probability);

    static Factor constant(double value, Semantics semantics = Semantics::probability);
    static Factor filled(std::vector<VarId> scope, std::vector<std::size_t> cardinalities, double value,
                         Semantics semantics = Semantics::probability);
    /// 1 at `outcome`, 0 elsewhere.
    static Factor indicator(VarId var, std::size_t cardinality, std::size_t outcome);

    [[nodiscard]] const std::vector<VarId>& scope() const noexcept { return scope_; }
    [[nodiscard]] const std::vector<std::size_t>& cardinalities() const noexcept { return cards_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] std::vector<double>& values() noexcept { return values_; }
    [[nodiscard]] Semantics semantics() const noexcept { return semantics_; }
    void set_semantics(Semantics s) noexcept { semantics_ = s; }

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool contains(VarId v) const;
    /// Position of `v` in the scope; throws VAR_NOT_IN_SCOPE.
    [[nodiscard]] std::size_t axis(VarId v) const;
    [[nodiscard]] std::size_t cardinality(VarId v) const { return cards_[axis(v)]; }

    [[nodiscard]] double operator[](std::size_t flat) const { return values_[flat]; }
    /// Entry at a full assignment of the scope (extra variables ignored).
    [[nodiscard]] double at(const Assignment& a) const;
    [[nodiscard]] std::size_t flat_index(const Assignment& a) const;
    /// Per-variable outcome indices of a flat index, in scope order.
    [[nodiscard]] std::vector<std::size_t> unflatten(std::size_t flat) const;

    [[nodiscard]] double sum() const;
    [[nodiscard]] double min() const;
    [[nodiscard]] double max() const;

private:
    std::vector<VarId> scope_;
    std::vector<std::size_t> cards_;
    std::vector<double> values_{1.0};
    Semantics semantics_ = Semantics::probability;
};

/// For every retained configuration (row-major over the retained scope), the
/// flat index of the maximizing configuration of the eliminated variables.
struct ArgmaxTable {
    std::vector<VarId> eliminated;
    std::vector<std::size_t> cardinalities;
    std::vector<std::size_t> choice;
};

struct MaxMarginal {
    Factor max;
    ArgmaxTable argmax;
};

Factor multiply(const Factor& f, const Factor& g);
Factor marginalize_sum(const Factor& f, std::span<const VarId> vars);
MaxMarginal marginalize_max(const Factor& f, std::span<const VarId> vars);
/// Slice at the observed outcomes; variables outside the scope are ignored.
Factor reduce(const Factor& f, const Assignment& evidence);

/// Same table with its axes permuted into `order` (a permutation of the scope).
Factor align(const Factor& f, std::span<const VarId> order);

/// Entrywise comparison after aligning `g` to `f`'s scope order.
bool approx_equal(const Factor& f, const Factor& g, double tol);

/// Product of all factors; the constant 1 for an empty list.
Factor product(std::span<const Factor> factors);

/// Walks every configuration of `cards` in row-major order.
class ConfigCounter {
public:
    explicit ConfigCounter(std::vector<std::size_t> cards);

    [[nodiscard]] const std::vector<std::size_t>& digits() const noexcept { return digits_; }
    [[nodiscard]] bool done() const noexcept { return done_; }
    void next();
    [[nodiscard]] static std::size_t count(std::span<const std::size_t> cards);

private:
    std::vector<std::size_t> cards_;
    std::vector<std::size_t> digits_;
    bool done_ = false;
};

}  // namespace idsolve
