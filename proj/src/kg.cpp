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

#include "kgcal/kg.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace kgcal {

namespace {

constexpr char kSnapshotMagic[] = "KGCAL-KG v1";

std::uint64_t key_of(EntityId s, RelationId p) {
    return (static_cast<std::uint64_t>(s) << 32) | p;
}

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw FormatError("unexpected end of snapshot blob");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_u32_array(std::ostream& os, std::span<const std::uint32_t> xs) {
    for (auto x : xs) write_u32(os, x);
}

std::vector<std::uint32_t> read_u32_array(std::istream& is, std::size_t n) {
    std::vector<std::uint32_t> out(n);
    for (auto& x : out) x = read_u32(is);
    return out;
}

std::uint64_t parse_manifest_count(const std::string& line, const std::string& key) {
    const auto eq = line.find('=');
    if (eq == std::string::npos || line.substr(0, eq) != key + " ")
        throw FormatError("snapshot manifest: expected '" + key + " = ...', got '" + line + "'");
    return std::stoull(line.substr(eq + 1));
}

}  // namespace

void SpIndex::build(std::span<const Triple> triples) {
    std::vector<std::size_t> order(triples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = triples[a];
        const auto& y = triples[b];
        if (x.subject != y.subject) return x.subject < y.subject;
        if (x.relation != y.relation) return x.relation < y.relation;
        return x.object < y.object;
    });

    keys_.clear();
    offsets_.clear();
    values_.clear();
    values_.reserve(triples.size());
    std::uint64_t prev_key = ~0ull;
    EntityId prev_obj = kNoEntity;
    for (std::size_t i : order) {
        const auto& t = triples[i];
        const std::uint64_t k = key_of(t.subject, t.relation);
        if (k != prev_key) {
            keys_.push_back(t.subject);
            keys_.push_back(t.relation);
            offsets_.push_back(static_cast<std::uint32_t>(values_.size()));
            prev_key = k;
            prev_obj = kNoEntity;
        }
        if (t.object == prev_obj) continue;  // duplicates were already dropped upstream
        values_.push_back(t.object);
        prev_obj = t.object;
    }
    offsets_.push_back(static_cast<std::uint32_t>(values_.size()));
}

std::span<const EntityId> SpIndex::objects(EntityId s, RelationId p) const {
    const std::uint64_t target = key_of(s, p);
    std::size_t lo = 0, hi = num_keys();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        const std::uint64_t k = key_of(keys_[2 * mid], keys_[2 * mid + 1]);
        if (k < target)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < num_keys() && key_of(keys_[2 * lo], keys_[2 * lo + 1]) == target)
        return slot_objects(lo);
    return {};
}

std::pair<std::size_t, std::size_t> SpIndex::subject_key_range(EntityId s) const {
    const auto lower = [&](std::uint64_t target) {
        std::size_t lo = 0, hi = num_keys();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            const std::uint64_t k = key_of(keys_[2 * mid], keys_[2 * mid + 1]);
            if (k < target)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    };
    return {lower(key_of(s, 0)), lower(key_of(s + 1, 0))};
}

std::span<const EntityId> SpIndex::slot_objects(std::size_t slot) const {
    return {values_.data() + offsets_[slot],
            values_.data() + offsets_[slot + 1]};
}

void SpIndex::adopt(std::vector<std::uint32_t> keys, std::vector<std::uint32_t> offsets,
                    std::vector<EntityId> values) {
    keys_ = std::move(keys);
    offsets_ = std::move(offsets);
    values_ = std::move(values);
}

EntityId KnowledgeGraph::entity_id(const std::string& name) const {
    const auto it = entity_ids_.find(name);
    if (it == entity_ids_.end()) throw ParseError("unknown entity '" + name + "'");
    return it->second;
}

RelationId KnowledgeGraph::relation_id(const std::string& name) const {
    const auto it = relation_ids_.find(name);
    if (it == relation_ids_.end()) throw ParseError("unknown relation '" + name + "'");
    return it->second;
}

RelationId KnowledgeGraph::reciprocal_of(RelationId p) const {
    if (!has_reciprocals_) throw ConfigError("reciprocal_of called before add_reciprocals");
    return p < num_original_relations_ ? p + num_original_relations_
                                       : p - num_original_relations_;
}

std::span<const EntityId> KnowledgeGraph::filtered_answers(EntityId s, RelationId p,
                                                           Scope scope) const {
    if (s >= num_entities() || p >= num_relations())
        throw ConfigError("filtered_answers: id out of range");
    return index(scope).objects(s, p);
}

KnowledgeGraph KnowledgeGraph::ingest_triples(
    const std::vector<std::pair<std::string, Split>>& paths) {
    if (paths.empty()) throw ConfigError("ingest_triples: no input files given");

    KnowledgeGraph kg;
    std::set<std::array<std::uint32_t, 3>> seen_ids[3];

    const auto intern_entity = [&kg](const std::string& name) {
        const auto it = kg.entity_ids_.find(name);
        if (it != kg.entity_ids_.end()) return it->second;
        const EntityId id = static_cast<EntityId>(kg.entity_names_.size());
        kg.entity_names_.push_back(name);
        kg.entity_ids_.emplace(name, id);
        return id;
    };
    const auto intern_relation = [&kg](const std::string& name) {
        const auto it = kg.relation_ids_.find(name);
        if (it != kg.relation_ids_.end()) return it->second;
        const RelationId id = static_cast<RelationId>(kg.relation_names_.size());
        kg.relation_names_.push_back(name);
        kg.relation_ids_.emplace(name, id);
        return id;
    };

    for (const auto& [path, split] : paths) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open triple file '" + path + "'");
        std::string line;
        std::uint64_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const auto tab1 = line.find('\t');
            const auto tab2 = tab1 == std::string::npos ? std::string::npos
                                                        : line.find('\t', tab1 + 1);
            if (tab1 == std::string::npos || tab2 == std::string::npos ||
                line.find('\t', tab2 + 1) != std::string::npos) {
                throw ParseError(path + ":" + std::to_string(lineno) +
                                 ": expected 3 tab-separated fields");
            }
            const std::string s_name = line.substr(0, tab1);
            const std::string p_name = line.substr(tab1 + 1, tab2 - tab1 - 1);
            const std::string o_name = line.substr(tab2 + 1);
            if (s_name.empty() || p_name.empty() || o_name.empty()) {
                throw ParseError(path + ":" + std::to_string(lineno) + ": empty field");
            }
            ++kg.stats_.lines;
            const EntityId s = intern_entity(s_name);
            const RelationId p = intern_relation(p_name);
            const EntityId o = intern_entity(o_name);
            const int si = static_cast<int>(split);
            if (!seen_ids[si].insert({s, p, o}).second) {
                ++kg.stats_.duplicates_dropped;
                diag::warn(path + ":" + std::to_string(lineno) + ": duplicate triple dropped");
                continue;
            }
            kg.triples_[si].push_back({s, p, o});
        }
    }

    kg.num_original_relations_ = kg.num_relations();
    kg.finalize_indexes();
    return kg;
}

void KnowledgeGraph::add_reciprocals() {
    if (has_reciprocals_) throw ConfigError("add_reciprocals called twice");
    const RelationId r0 = num_original_relations_;
    for (RelationId p = 0; p < r0; ++p) {
        const std::string name = relation_names_[p] + "_reciprocal";
        if (relation_ids_.count(name))
            throw ConfigError("reciprocal name collision for relation '" + relation_names_[p] +
                              "'");
        relation_ids_.emplace(name, static_cast<RelationId>(relation_names_.size()));
        relation_names_.push_back(name);
    }
    for (auto& split : triples_) {
        const std::size_t n = split.size();
        split.reserve(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            const Triple& t = split[i];
            split.push_back({t.object, t.relation + r0, t.subject});
        }
    }
    has_reciprocals_ = true;
    finalize_indexes();
}

void KnowledgeGraph::finalize_indexes() {
    train_index_.build(triples_[0]);
    std::vector<Triple> all;
    all.reserve(triples_[0].size() + triples_[1].size() + triples_[2].size());
    for (const auto& split : triples_) all.insert(all.end(), split.begin(), split.end());
    full_index_.build(all);
}

KnowledgeGraph KnowledgeGraph::from_parts(std::vector<std::string> entities,
                                          std::vector<std::string> relations,
                                          std::vector<Triple> train, std::vector<Triple> valid,
                                          std::vector<Triple> test) {
    KnowledgeGraph kg;
    kg.entity_names_ = std::move(entities);
    kg.relation_names_ = std::move(relations);
    for (EntityId i = 0; i < kg.num_entities(); ++i)
        kg.entity_ids_.emplace(kg.entity_names_[i], i);
    for (RelationId i = 0; i < kg.num_relations(); ++i)
        kg.relation_ids_.emplace(kg.relation_names_[i], i);
    kg.triples_[0] = std::move(train);
    kg.triples_[1] = std::move(valid);
    kg.triples_[2] = std::move(test);
    kg.num_original_relations_ = kg.num_relations();
    kg.finalize_indexes();
    return kg;
}

void KnowledgeGraph::save_snapshot(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open '" + path + "' for writing");
    os << kSnapshotMagic << "\n";
    os << "entities = " << num_entities() << "\n";
    os << "relations = " << num_relations() << "\n";
    os << "original-relations = " << num_original_relations_ << "\n";
    os << "reciprocals = " << (has_reciprocals_ ? 1 : 0) << "\n";
    os << "train = " << triples_[0].size() << "\n";
    os << "valid = " << triples_[1].size() << "\n";
    os << "test = " << triples_[2].size() << "\n";
    os << "train-index-keys = " << train_index_.num_keys() << "\n";
    os << "train-index-values = " << train_index_.values().size() << "\n";
    os << "full-index-keys = " << full_index_.num_keys() << "\n";
    os << "full-index-values = " << full_index_.values().size() << "\n";
    os << "---ENTITIES\n";
    for (const auto& n : entity_names_) os << n << "\n";
    os << "---RELATIONS\n";
    for (const auto& n : relation_names_) os << n << "\n";
    os << "---BLOB\n";
    for (const auto& split : triples_) {
        for (const auto& t : split) {
            write_u32(os, t.subject);
            write_u32(os, t.relation);
            write_u32(os, t.object);
        }
    }
    for (const SpIndex* idx : {&train_index_, &full_index_}) {
        write_u32_array(os, idx->keys());
        write_u32_array(os, idx->offsets());
        write_u32_array(os, idx->values());
    }
    if (!os) throw ConfigError("write failed for '" + path + "'");
}

KnowledgeGraph KnowledgeGraph::load_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(is, line) || line != kSnapshotMagic)
        throw FormatError("'" + path + "': bad snapshot magic");

    const auto next_count = [&is, &path](const std::string& key) {
        std::string l;
        if (!std::getline(is, l)) throw FormatError("'" + path + "': truncated manifest");
        return parse_manifest_count(l, key);
    };
    const std::uint64_t n_ent = next_count("entities");
    const std::uint64_t n_rel = next_count("relations");
    const std::uint64_t n_orig = next_count("original-relations");
    const std::uint64_t recip = next_count("reciprocals");
    const std::uint64_t n_train = next_count("train");
    const std::uint64_t n_valid = next_count("valid");
    const std::uint64_t n_test = next_count("test");
    const std::uint64_t ti_keys = next_count("train-index-keys");
    const std::uint64_t ti_vals = next_count("train-index-values");
    const std::uint64_t fi_keys = next_count("full-index-keys");
    const std::uint64_t fi_vals = next_count("full-index-values");

    if (!std::getline(is, line) || line != "---ENTITIES")
        throw FormatError("'" + path + "': missing entity section");
    KnowledgeGraph kg;
    kg.entity_names_.reserve(n_ent);
    for (std::uint64_t i = 0; i < n_ent; ++i) {
        if (!std::getline(is, line)) throw FormatError("'" + path + "': truncated entity list");
        kg.entity_names_.push_back(line);
        kg.entity_ids_.emplace(line, static_cast<EntityId>(i));
    }
    if (!std::getline(is, line) || line != "---RELATIONS")
        throw FormatError("'" + path + "': missing relation section");
    kg.relation_names_.reserve(n_rel);
    for (std::uint64_t i = 0; i < n_rel; ++i) {
        if (!std::getline(is, line)) throw FormatError("'" + path + "': truncated relation list");
        kg.relation_names_.push_back(line);
        kg.relation_ids_.emplace(line, static_cast<RelationId>(i));
    }
    if (!std::getline(is, line) || line != "---BLOB")
        throw FormatError("'" + path + "': missing blob section");

    const std::uint64_t counts[3] = {n_train, n_valid, n_test};
    for (int si = 0; si < 3; ++si) {
        kg.triples_[si].reserve(counts[si]);
        for (std::uint64_t i = 0; i < counts[si]; ++i) {
            Triple t;
            t.subject = read_u32(is);
            t.relation = read_u32(is);
            t.object = read_u32(is);
            if (t.subject >= n_ent || t.object >= n_ent || t.relation >= n_rel)
                throw ShapeError("'" + path + "': triple id out of vocabulary bounds");
            kg.triples_[si].push_back(t);
        }
    }

    const auto read_index = [&is](SpIndex& idx, std::uint64_t nkeys, std::uint64_t nvals) {
        auto keys = read_u32_array(is, 2 * nkeys);
        auto offsets = read_u32_array(is, nkeys + 1);
        auto values = read_u32_array(is, nvals);
        if (!offsets.empty() && offsets.back() != nvals)
            throw ShapeError("snapshot index offsets inconsistent with value count");
        idx.adopt(std::move(keys), std::move(offsets), std::move(values));
    };
    read_index(kg.train_index_, ti_keys, ti_vals);
    read_index(kg.full_index_, fi_keys, fi_vals);

    kg.num_original_relations_ = static_cast<RelationId>(n_orig);
    kg.has_reciprocals_ = recip != 0;
    return kg;
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "valid") return Split::valid;
    if (s == "test") return Split::test;
    throw ConfigError("unknown split '" + s + "' (expected train, valid, or test)");
}

std::string to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::valid: return "valid";
        case Split::test: return "test";
    }
    return "?";
}

}  // namespace kgcal
