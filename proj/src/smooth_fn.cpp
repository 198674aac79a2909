#include "ghe/smooth_fn.hpp"

#include <stdexcept>
#include <string>

namespace ghe {

SmoothFn::SmoothFn(Expr base) : base_(std::move(base))
{
    partials_.assign(kSlots, base_);
    const int n = arity();
    for (int order = 1; order <= kCachedOrder; ++order) {
        for (int j = 0; j <= order; ++j) {
            const int i = order - j;
            if (n == 1 && j > 0) continue;
            // Differentiate from a lower cached partial: first variable when
            // i > 0, otherwise second.
            const Expr& from = i > 0 ? partials_[slot(i - 1, j)] : partials_[slot(i, j - 1)];
            partials_[slot(i, j)] = differentiate(from, i > 0 ? 0 : 1);
        }
    }
    programs_.reserve(kSlots);
    for (const Expr& e : partials_) programs_.emplace_back(e);
}

SmoothFn SmoothFn::parse(std::string_view source, std::vector<std::string> vars)
{
    return SmoothFn(ghe::parse(source, VariableSet(std::move(vars))));
}

Expr SmoothFn::partial(int i, int j) const
{
    if (i < 0 || j < 0) throw std::invalid_argument("negative derivative order");
    if (j > 0 && arity() < 2) throw std::invalid_argument("second-variable partial of a unary function");
    if (i + j <= kCachedOrder) return partials_[slot(i, j)];
    Expr e = partials_[slot(kCachedOrder, 0)];
    int have_i = kCachedOrder;
    int have_j = 0;
    if (i < kCachedOrder) {
        e = partials_[slot(i, kCachedOrder - i)];
        have_i = i;
        have_j = kCachedOrder - i;
    }
    for (; have_i < i; ++have_i) e = differentiate(e, 0);
    for (; have_j < j; ++have_j) e = differentiate(e, 1);
    return e;
}

const Program& SmoothFn::program(int i, int j) const
{
    if (i + j > kCachedOrder || i < 0 || j < 0 || (j > 0 && arity() < 2))
        throw std::out_of_range("partial (" + std::to_string(i) + "," + std::to_string(j) +
                                ") is not cached");
    return programs_[slot(i, j)];
}

double SmoothFn::checked(int i, int j, std::span<const double> values) const
{
    if (i + j <= kCachedOrder) return program(i, j).checked(values);
    return partial(i, j).evaluate(values);
}

}  // namespace ghe
