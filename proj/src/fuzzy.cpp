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

#include "kgcal/fuzzy.hpp"

#include <algorithm>
#include <cmath>

namespace kgcal {

namespace {

constexpr double kPi = 3.14159265358979323846;

double checked01(double x) {
    if (x < 0.0 || x > 1.0) {
        diag::warn("fuzzy operand " + std::to_string(x) + " outside [0,1], clamped");
        return clamp01(x);
    }
    return x;
}

double tnorm_raw(TNormKind kind, double x, double y) {
    switch (kind) {
        case TNormKind::godel:
            return std::min(x, y);
        case TNormKind::product:
            return x * y;
        case TNormKind::lukasiewicz:
            return std::max(0.0, x + y - 1.0);
    }
    return 0.0;
}

}  // namespace

double tnorm(const FuzzySemantics& sem, double x, double y) {
    return tnorm_raw(sem.tnorm, checked01(x), checked01(y));
}

double tconorm(const FuzzySemantics& sem, double x, double y) {
    x = checked01(x);
    y = checked01(y);
    return 1.0 - tnorm_raw(sem.tnorm, 1.0 - x, 1.0 - y);
}

double negation(const FuzzySemantics& sem, double x) {
    x = checked01(x);
    switch (sem.negation) {
        case NegationKind::standard:
            return 1.0 - x;
        case NegationKind::strict_cosine:
            return 0.5 * (1.0 + std::cos(kPi * x));
    }
    return 0.0;
}

double tnorm_fold(const FuzzySemantics& sem, std::span<const double> xs) {
    double acc = 1.0;
    for (double x : xs) acc = tnorm(sem, acc, x);
    return acc;
}

double tconorm_fold(const FuzzySemantics& sem, std::span<const double> xs) {
    double acc = 0.0;
    for (double x : xs) acc = tconorm(sem, acc, x);
    return acc;
}

TNormKind tnorm_from_string(const std::string& s) {
    if (s == "min" || s == "godel") return TNormKind::godel;
    if (s == "prod" || s == "product") return TNormKind::product;
    if (s == "luk" || s == "lukasiewicz") return TNormKind::lukasiewicz;
    throw ConfigError("unknown t-norm '" + s + "' (expected min, prod, or luk)");
}

NegationKind negation_from_string(const std::string& s) {
    if (s == "std" || s == "standard") return NegationKind::standard;
    if (s == "cos" || s == "cosine") return NegationKind::strict_cosine;
    throw ConfigError("unknown negation '" + s + "' (expected std or cos)");
}

std::string to_string(TNormKind k) {
    switch (k) {
        case TNormKind::godel: return "min";
        case TNormKind::product: return "prod";
        case TNormKind::lukasiewicz: return "luk";
    }
    return "?";
}

std::string to_string(NegationKind k) {
    return k == NegationKind::standard ? "std" : "cos";
}

}  // namespace kgcal
