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

#ifndef KGCAL_KG_HPP_
#define KGCAL_KG_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgcal/common.hpp"

namespace kgcal {

struct Triple {
    EntityId subject;
    RelationId relation;
    EntityId object;

    friend bool operator==(const Triple&, const Triple&) = default;
};

/// Sorted (subject, relation) -> object-list index in CSR form. Immutable
/// once built; lookups are binary searches over the key array.
class SpIndex {
public:
    void build(std::span<const Triple> triples);

    /// Sorted, deduplicated object ids for (s, p); empty if no edges.
    std::span<const EntityId> objects(EntityId s, RelationId p) const;

    /// All (relation, object) pairs leaving subject `s`, as a contiguous
    /// range of key slots; used by the sampler for uniform edge picks.
    std::pair<std::size_t, std::size_t> subject_key_range(EntityId s) const;

    std::size_t num_keys() const { return keys_.size() / 2; }
    std::span<const std::uint32_t> keys() const { return keys_; }
    std::span<const std::uint32_t> offsets() const { return offsets_; }
    std::span<const EntityId> values() const { return values_; }
    RelationId key_relation(std::size_t slot) const { return keys_[2 * slot + 1]; }
    std::span<const EntityId> slot_objects(std::size_t slot) const;

    void adopt(std::vector<std::uint32_t> keys, std::vector<std::uint32_t> offsets,
               std::vector<EntityId> values);

    friend bool operator==(const SpIndex&, const SpIndex&) = default;

private:
    std::vector<std::uint32_t> keys_;     // (s, p) pairs, flattened, sorted
    std::vector<std::uint32_t> offsets_;  // num_keys + 1
    std::vector<EntityId> values_;        // sorted objects per key
};

struct IngestStats {
    std::uint64_t lines = 0;
    std::uint64_t duplicates_dropped = 0;
};

/// Entity/relation vocabularies, split-tagged triples, and the adjacency
/// indexes used for traversal and filtered evaluation. Immutable after
/// construction; safe for shared read access.
class KnowledgeGraph {
public:
    EntityId num_entities() const { return static_cast<EntityId>(entity_names_.size()); }
    RelationId num_relations() const { return static_cast<RelationId>(relation_names_.size()); }
    RelationId num_original_relations() const { return num_original_relations_; }
    bool has_reciprocals() const { return has_reciprocals_; }

    const std::string& entity_name(EntityId e) const { return entity_names_.at(e); }
    const std::string& relation_name(RelationId r) const { return relation_names_.at(r); }
    EntityId entity_id(const std::string& name) const;
    RelationId relation_id(const std::string& name) const;
    bool has_entity(const std::string& name) const { return entity_ids_.count(name) != 0; }
    bool has_relation(const std::string& name) const { return relation_ids_.count(name) != 0; }

    /// The inverse direction of `p`; valid only once reciprocals exist.
    RelationId reciprocal_of(RelationId p) const;

    const std::vector<Triple>& triples(Split s) const { return triples_[static_cast<int>(s)]; }

    /// Exactly the objects o with (s, p, o) in the selected scope, sorted.
    std::span<const EntityId> filtered_answers(EntityId s, RelationId p, Scope scope) const;

    const SpIndex& index(Scope scope) const {
        return scope == Scope::train_only ? train_index_ : full_index_;
    }

    const IngestStats& ingest_stats() const { return stats_; }

    /// Build a graph from tab-separated `subject<TAB>relation<TAB>object`
    /// files. Vocabularies cover the union of all splits, ids assigned in
    /// first-seen order. Duplicate lines within a split are dropped with a
    /// warning.
    static KnowledgeGraph ingest_triples(
        const std::vector<std::pair<std::string, Split>>& paths);

    /// Add a mirrored triple (o, p~, s) for every stored triple, in every
    /// split. Doubles the relation vocabulary; the mirror of relation id p
    /// is p + R where R is the original relation count.
    void add_reciprocals();

    void save_snapshot(const std::string& path) const;
    static KnowledgeGraph load_snapshot(const std::string& path);

    /// For tests: construct directly from parts.
    static KnowledgeGraph from_parts(std::vector<std::string> entities,
                                     std::vector<std::string> relations,
                                     std::vector<Triple> train, std::vector<Triple> valid,
                                     std::vector<Triple> test);

private:
    void finalize_indexes();

    std::vector<std::string> entity_names_;
    std::vector<std::string> relation_names_;
    std::unordered_map<std::string, EntityId> entity_ids_;
    std::unordered_map<std::string, RelationId> relation_ids_;
    std::vector<Triple> triples_[3];
    SpIndex train_index_;
    SpIndex full_index_;
    RelationId num_original_relations_ = 0;
    bool has_reciprocals_ = false;
    IngestStats stats_;
};

Split split_from_string(const std::string& s);
std::string to_string(Split s);

}  // namespace kgcal

#endif  // KGCAL_KG_HPP_
