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

#ifndef KGCAL_QUERY_HPP_
#define KGCAL_QUERY_HPP_

#include <string>
#include <vector>

#include "kgcal/kg.hpp"

namespace kgcal {

/// An atom argument: either a known entity or a variable. Variable 0 is
/// always the query target.
struct Term {
    enum class Kind { anchor, variable };
    Kind kind;
    std::uint32_t id;  // entity id, or variable index

    static Term anchor(EntityId e) { return {Kind::anchor, e}; }
    static Term var(std::uint32_t v) { return {Kind::variable, v}; }
    bool is_var() const { return kind == Kind::variable; }

    friend bool operator==(const Term&, const Term&) = default;
};

struct Atom {
    RelationId predicate;
    Term arg1;
    Term arg2;
    bool negated = false;

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// A first-order query in disjunctive normal form: a disjunction of
/// conjunctions of (possibly negated) atoms over one target variable,
/// existential intermediate variables, and anchor entities. The dependency
/// graph of each disjunct is a DAG whose unique sink is the target.
struct QueryGraph {
    std::vector<std::vector<Atom>> disjuncts;
    std::uint32_t num_vars = 1;  // target + intermediates

    friend bool operator==(const QueryGraph&, const QueryGraph&) = default;
};

/// The 14 benchmark structure names, in reporting order.
const std::vector<std::string>& query_type_names();
bool is_negation_type(const std::string& type);

struct LabeledQuery {
    QueryGraph graph;
    std::string type;
    std::vector<EntityId> easy;  // sorted; reachable on the train graph
    std::vector<EntityId> hard;  // sorted; require at least one missing link

    friend bool operator==(const LabeledQuery&, const LabeledQuery&) = default;
};

/// Parse the textual query DSL, resolving names against the graph's
/// vocabularies. Grammar (whitespace-insensitive except around the
/// exists-dot):
///
///   ?T : exists V1, V2 . p(a, V1) & q(V1, T) & !r(b, T)
///   ?T : (p(a, T)) | (q(b, T))
///
/// `|` separates disjuncts (optionally parenthesized), `&` separates atoms,
/// `!` negates an atom, and `exists` may appear once before the whole body
/// or at the head of a disjunct. The result is validated.
QueryGraph parse_query(const KnowledgeGraph& kg, const std::string& text);

/// Canonical textual form; parse(serialize(g)) == g.
std::string serialize_query(const KnowledgeGraph& kg, const QueryGraph& graph);

struct ValidationIssue {
    std::string rule;
    int disjunct;  // -1 when not atom-specific
    int atom;
    std::string message;
};

/// Structural checks: DAG dependency graph, unique sink equal to the
/// target, anchors only in subject position, every variable reachable from
/// an anchor and supported by at least one non-negated inbound atom.
std::vector<ValidationIssue> validate_query(const QueryGraph& graph);

/// Throwing wrapper around validate_query.
void require_valid(const QueryGraph& graph);

/// Exact answer set under Boolean semantics: an entity is an answer when
/// some disjunct admits an assignment of the intermediate variables that
/// satisfies every positive atom and violates every negated one.
std::vector<EntityId> traverse_answers(const KnowledgeGraph& kg, const QueryGraph& graph,
                                       Scope scope);

/// Deterministic topological order of a disjunct's variables (target last).
std::vector<std::uint32_t> topo_order(const std::vector<Atom>& disjunct,
                                      std::uint32_t num_vars);

}  // namespace kgcal

#endif  // KGCAL_QUERY_HPP_
