#pragma once

// Eligibility restrictions for the quasi-reductivity checker and the two
// system transformations it relies on.

#include <cstddef>
#include <vector>

#include "lctrs/system.hpp"

namespace lctrs {

struct LinearityReport {
    bool ok = true;
    std::vector<std::size_t> offendingRules;  // indices into sys.rules()
};

struct InhabitationReport {
    bool ok = true;
    std::vector<Sort> uninhabited;  // input sorts of defined symbols with no ground constructor term
};

struct ValueOccurrence {
    std::size_t rule;
    Position position;  // within the lhs
    Value value;
};

struct ValueFreedomReport {
    bool ok = true;
    std::vector<ValueOccurrence> occurrences;
};

struct RestrictionReport {
    LinearityReport leftLinear;
    InhabitationReport constructorSound;
    ValueFreedomReport leftValueFree;

    bool eligible() const { return leftLinear.ok && constructorSound.ok && leftValueFree.ok; }
};

LinearityReport checkLeftLinear(const Lctrs& sys);
InhabitationReport checkConstructorSound(const Lctrs& sys);
ValueFreedomReport checkLeftValueFree(const Lctrs& sys);
RestrictionReport checkRestrictions(const Lctrs& sys);

/// Sorts that contain at least one ground constructor term.
std::vector<Sort> inhabitedSorts(const Lctrs& sys);

/// Replaces every value v in a left-hand side by a fresh variable x and
/// conjoins x = v to the constraint. The rewrite relation is unchanged.
Lctrs makeLeftValueFree(const Lctrs& sys);

struct ConstructorRestriction {
    Lctrs system;
    /// Defined symbols of the input whose every rule was dropped; they are
    /// constructors of the restricted system but not of the input.
    std::vector<SymbolRef> lostDefined;

    bool sameConstructors() const { return lostDefined.empty(); }
};

/// Keeps only rules whose lhs arguments are all constructor terms.
ConstructorRestriction restrictToConstructorRules(const Lctrs& sys);

}  // namespace lctrs
