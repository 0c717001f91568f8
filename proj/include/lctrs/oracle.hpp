#pragma once

// Brute-force search for ground terms that are stuck: a defined or
// calculation symbol applied to ground constructor terms with no applicable
// rule.

#include <cstddef>
#include <optional>
#include <vector>

#include "lctrs/system.hpp"

namespace lctrs {

struct EnumBudget {
    /// Values and constants have depth 1.
    std::size_t maxDepth = 3;
    BigInt intMin = -4;
    BigInt intMax = 4;
    std::vector<IntArray> arrayValues = defaultArrays();
    /// Cap on terms per sort and on basic terms examined.
    std::size_t maxTerms = 1'000'000;

    /// Arrays of length at most 2 over {0, 1}.
    static std::vector<IntArray> defaultArrays();
    bool wellFormed() const { return maxDepth > 0 && intMin <= intMax && !arrayValues.empty() && maxTerms > 0; }
};

/// Ground constructor terms of `sort` within the budget, each once, ordered
/// by size; values come first in ascending order.
std::vector<Term> enumerateGroundConstructorTerms(const Lctrs& sys, const Sort& sort, const EnumBudget& budget);

struct OracleResult {
    std::optional<Term> stuck;
    std::size_t examined = 0;
    /// The maxTerms cap cut the search short.
    bool truncated = false;
};

/// First irreducible basic term f(s1,...,sn), scanning defined symbols in
/// rule order, then calculation symbols, each over the argument product in
/// enumeration order.
OracleResult findStuckTerm(const Lctrs& sys, const EnumBudget& budget = {});

}  // namespace lctrs
