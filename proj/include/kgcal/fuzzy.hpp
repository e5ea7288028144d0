/*
 * Copyright 2026 The kgcal Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef KGCAL_FUZZY_HPP_
#define KGCAL_FUZZY_HPP_

#include <span>
#include <string>

#include "kgcal/common.hpp"

namespace kgcal {

enum class TNormKind { godel, product, lukasiewicz };
enum class NegationKind { standard, strict_cosine };

/// Fuzzy conjunction/disjunction/negation used to aggregate atom scores.
/// The disjunction is always the dual of the configured t-norm.
struct FuzzySemantics {
    TNormKind tnorm = TNormKind::product;
    NegationKind negation = NegationKind::standard;
};

/// Fuzzy conjunction on [0,1]. Inputs outside [0,1] are clamped with a
/// warning.
double tnorm(const FuzzySemantics& sem, double x, double y);

/// Fuzzy disjunction, computed exactly via 1 - T(1-x, 1-y).
double tconorm(const FuzzySemantics& sem, double x, double y);

/// Fuzzy negation on [0,1].
double negation(const FuzzySemantics& sem, double x);

/// Left fold of the t-norm over a sequence; empty input yields 1 (the
/// t-norm identity).
double tnorm_fold(const FuzzySemantics& sem, std::span<const double> xs);

/// Left fold of the t-conorm over a sequence; empty input yields 0.
double tconorm_fold(const FuzzySemantics& sem, std::span<const double> xs);

TNormKind tnorm_from_string(const std::string& s);
NegationKind negation_from_string(const std::string& s);
std::string to_string(TNormKind k);
std::string to_string(NegationKind k);

}  // namespace kgcal

#endif  // KGCAL_FUZZY_HPP_
