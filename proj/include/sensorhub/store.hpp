// Copyright 2026 The SensorHub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// Entity store: CRUD, cascade rules, paging and relation navigation over
/// the sensing model, optionally backed by a snapshot + write-ahead log.
///
/// All mutation goes through `Store::write`, which runs a callback against a
/// `Store::Txn` under the writer lock. A transaction either commits as one
/// WAL batch or is rolled back in memory; readers never see partial state.
/// The convenience methods (`create`, `update`, `remove`, ...) are one-op
/// transactions.

#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sensorhub/entity.hpp"
#include "sensorhub/journal.hpp"
#include "sensorhub/validate.hpp"

namespace sensorhub {

enum class ResultFormat { Default, DataArray };

struct QueryParams {
  std::optional<std::size_t> top;
  std::optional<std::size_t> skip;
  bool count = false;
  ResultFormat format = ResultFormat::Default;
};

struct Page {
  std::vector<Entity> items;
  std::optional<std::size_t> total_count;  // present iff count requested
  std::optional<std::size_t> next_offset;  // present iff more items exist
};

struct CascadeReport {
  std::vector<EntityRef> deleted;
  std::vector<std::pair<EntityRef, std::string>> unlinked;
};

using NavigationResult = std::variant<Page, Entity>;

struct StoreOptions {
  /// Unset means purely in-memory.
  std::optional<std::filesystem::path> data_dir;
  FieldPolicy field_policy = FieldPolicy::Lenient;
  std::size_t default_page_size = 100;
  std::size_t max_top = 1000;
  std::size_t max_entities = 100'000'000;
  bool sync_writes = false;
  /// WAL size that triggers a checkpoint after a commit.
  std::size_t checkpoint_wal_bytes = 16u << 20;
  std::function<Instant()> clock = now_utc;
};

namespace detail {

struct StoreState {
  std::array<std::map<std::uint64_t, Entity>, kEntityKindCount> tables;
  std::array<std::uint64_t, kEntityKindCount> last_id{};
  // target -> entities holding a reference to it
  std::map<EntityRef, std::set<EntityRef>> referenced_by;
  std::map<std::string, std::set<std::string, std::less<>>, std::less<>> keys;
  std::size_t total = 0;

  std::map<std::uint64_t, Entity>& table(EntityKind k) { return tables[static_cast<std::size_t>(k)]; }
  const std::map<std::uint64_t, Entity>& table(EntityKind k) const { return tables[static_cast<std::size_t>(k)]; }

  const Entity* find(EntityRef r) const {
    const auto& t = table(r.kind);
    auto it = t.find(r.id);
    return it == t.end() ? nullptr : &it->second;
  }

  /// Inserts or replaces; keeps the reverse index in step.
  void put(Entity e) {
    const auto ref = ref_of(e);
    auto& t = table(ref.kind);
    auto it = t.find(ref.id);
    if (it != t.end()) {
      unindex(it->second);
      it->second = std::move(e);
    } else {
      it = t.emplace(ref.id, std::move(e)).first;
      ++total;
    }
    index(it->second);
    auto& last = last_id[static_cast<std::size_t>(ref.kind)];
    if (ref.id > last) last = ref.id;
  }

  std::optional<Entity> erase(EntityRef r) {
    auto& t = table(r.kind);
    auto it = t.find(r.id);
    if (it == t.end()) return std::nullopt;
    unindex(it->second);
    Entity old = std::move(it->second);
    t.erase(it);
    --total;
    return old;
  }

 private:
  void index(const Entity& e) {
    const auto self = ref_of(e);
    for (const auto& h : held_refs(e)) referenced_by[h.target].insert(self);
  }

  void unindex(const Entity& e) {
    const auto self = ref_of(e);
    for (const auto& h : held_refs(e)) {
      auto it = referenced_by.find(h.target);
      if (it == referenced_by.end()) continue;
      it->second.erase(self);
      if (it->second.empty()) referenced_by.erase(it);
    }
  }
};

}  // namespace detail

/// Read-only access to a consistent state. Obtained from `Store::read` or
/// as the base of a `Store::Txn`.
class StoreView {
 public:
  StoreView(const detail::StoreState& s, const StoreOptions& o) : s_(&s), opts_(&o) {}

  const Entity* find(EntityRef r) const { return s_->find(r); }

  const Entity& get(EntityRef r) const {
    if (const Entity* e = s_->find(r)) return *e;
    throw Error(Errc::NotFound, "no such entity: " + to_string(r), std::string(kind_name(r.kind)));
  }

  std::size_t size(EntityKind k) const { return s_->table(k).size(); }
  std::size_t total() const { return s_->total; }
  std::uint64_t last_id(EntityKind k) const { return s_->last_id[static_cast<std::size_t>(k)]; }

  const std::map<std::uint64_t, Entity>& table(EntityKind k) const { return s_->table(k); }

  bool has_key(std::string_view ns, std::string_view key) const {
    auto it = s_->keys.find(ns);
    return it != s_->keys.end() && it->second.count(key) > 0;
  }

  /// Entities of `kind` that hold a reference to `target`, ascending id.
  std::vector<EntityRef> referrers(EntityRef target, EntityKind kind) const {
    std::vector<EntityRef> out;
    auto it = s_->referenced_by.find(target);
    if (it == s_->referenced_by.end()) return out;
    for (const auto& r : it->second)
      if (r.kind == kind) out.push_back(r);
    return out;
  }

  template <class Pred>
  const Entity* find_first(EntityKind kind, Pred&& pred) const {
    for (const auto& [id, e] : s_->table(kind))
      if (pred(e)) return &e;
    return nullptr;
  }

  void check_params(EntityKind kind, const QueryParams& p) const {
    if (p.top && *p.top > opts_->max_top)
      throw Error(Errc::BadParams, "$top exceeds the server limit of " + std::to_string(opts_->max_top), "$top");
    if (p.format == ResultFormat::DataArray && kind != EntityKind::Observation)
      throw Error(Errc::BadParams, "resultFormat=dataArray is only available for Observations", "resultFormat");
  }

  Page query(EntityKind kind, const QueryParams& p) const {
    check_params(kind, p);
    const auto& t = s_->table(kind);
    const std::size_t total = t.size();
    const std::size_t skip = p.skip.value_or(0);
    const std::size_t top = p.top.value_or(opts_->default_page_size);
    Page page;
    if (skip < total) {
      auto it = t.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(skip));
      for (std::size_t n = 0; n < top && it != t.end(); ++n, ++it) page.items.push_back(it->second);
    }
    finish_page(page, p, skip, total);
    return page;
  }

  NavigationResult navigate(EntityRef ref, std::string_view relation, const QueryParams& p) const {
    const Entity& src = get(ref);
    const auto link = find_navigation(ref.kind, relation);
    if (!link)
      throw Error(Errc::UnknownRelation,
                  std::string(kind_name(ref.kind)) + " has no relation named " + std::string(relation),
                  std::string(relation));
    std::vector<EntityRef> targets;
    bool held = false;
    for (const auto& h : held_refs(src)) {
      if (h.relation == link->name) {
        targets.push_back(h.target);
        held = true;
      }
    }
    if (!link->to_many) {
      if (targets.empty()) throw Error(Errc::NotFound, "relation is unset", std::string(relation));
      return get(targets.front());
    }
    check_params(link->target, p);
    if (!held) targets = referrers(ref, link->target);
    std::sort(targets.begin(), targets.end());
    const std::size_t total = targets.size();
    const std::size_t skip = p.skip.value_or(0);
    const std::size_t top = p.top.value_or(opts_->default_page_size);
    Page page;
    for (std::size_t i = skip; i < total && page.items.size() < top; ++i) page.items.push_back(get(targets[i]));
    finish_page(page, p, skip, total);
    return page;
  }

  /// Every stored entity, grouped by kind, ascending id.
  std::vector<Entity> all() const {
    std::vector<Entity> out;
    out.reserve(s_->total);
    for (const auto& t : s_->tables)
      for (const auto& [id, e] : t) out.push_back(e);
    return out;
  }

  const StoreOptions& options() const { return *opts_; }

 protected:
  static void finish_page(Page& page, const QueryParams& p, std::size_t skip, std::size_t total) {
    if (p.count) page.total_count = total;
    const std::size_t end = skip + page.items.size();
    if (end < total) page.next_offset = end;
  }

  const detail::StoreState* s_;
  const StoreOptions* opts_;
};

class Store {
 public:
  class Txn;

  explicit Store(StoreOptions opts = {}) : opts_(std::move(opts)) {
    if (opts_.data_dir) {
      journal_ = std::make_unique<Journal>(*opts_.data_dir, opts_.sync_writes);
      journal_->recover([this](std::string_view snap) { load_snapshot(snap); },
                        [this](std::string_view batch) { replay_batch(batch); });
    }
  }

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  ~Store() {
    try {
      if (journal_) checkpoint();
    } catch (...) {
    }
  }

  const StoreOptions& options() const { return opts_; }
  bool persistent() const { return journal_ != nullptr; }

  /// Runs `fn(Txn&)` as one atomic write. If `fn` throws, every change it
  /// made is undone and the exception propagates.
  template <class Fn>
  decltype(auto) write(Fn&& fn);

  /// Runs `fn(const StoreView&)` under the shared lock.
  template <class Fn>
  decltype(auto) read(Fn&& fn) const {
    std::shared_lock lock(mu_);
    const StoreView view(state_, opts_);
    return fn(view);
  }

  EntityRef create(Entity e);
  Entity get(EntityRef r) const {
    return read([&](const StoreView& v) { return v.get(r); });
  }
  Entity update(EntityRef r, const json& patch);
  CascadeReport remove(EntityRef r);

  Page query(EntityKind kind, const QueryParams& p) const {
    return read([&](const StoreView& v) { return v.query(kind, p); });
  }

  NavigationResult navigate(EntityRef r, std::string_view relation, const QueryParams& p) const {
    return read([&](const StoreView& v) { return v.navigate(r, relation, p); });
  }

  std::vector<Entity> all() const {
    return read([](const StoreView& v) { return v.all(); });
  }

  std::array<std::uint64_t, kEntityKindCount> id_counters() const {
    std::shared_lock lock(mu_);
    return state_.last_id;
  }

  /// Writes a full snapshot and truncates the WAL. No-op in memory.
  void checkpoint() {
    if (!journal_) return;
    std::unique_lock lock(mu_);
    journal_->checkpoint(snapshot_payload());
  }

 private:
  friend class Txn;

  std::string snapshot_payload() const {
    json counters = json::object();
    for (auto k : kAllKinds) counters[std::string(kind_name(k))] = state_.last_id[static_cast<std::size_t>(k)];
    json ents = json::array();
    for (const auto& t : state_.tables)
      for (const auto& [id, e] : t)
        ents.push_back({{"kind", kind_name(kind_of(e))}, {"id", id}, {"fields", to_field_map(e)}});
    json keys = json::object();
    for (const auto& [ns, set] : state_.keys) keys[ns] = json(set);
    return json{{"counters", counters}, {"entities", ents}, {"keys", keys}}.dump();
  }

  void load_entity(const json& rec) {
    const auto kind = kind_from_name(rec.at("kind").get<std::string>());
    if (!kind) throw Error(Errc::CorruptStore, "unknown kind in store file");
    auto vr = validate_entity(*kind, rec.at("fields"), FieldPolicy::Lenient);
    if (!vr.ok()) throw Error(Errc::CorruptStore, "stored entity fails validation", vr.violations);
    set_id(*vr.entity, rec.at("id").get<std::uint64_t>());
    state_.put(std::move(*vr.entity));
  }

  void load_snapshot(std::string_view payload) {
    try {
      const json j = json::parse(payload);
      for (const auto& rec : j.at("entities")) load_entity(rec);
      for (const auto& [name, v] : j.at("counters").items()) {
        if (auto k = kind_from_name(name)) {
          auto& last = state_.last_id[static_cast<std::size_t>(*k)];
          last = std::max(last, v.get<std::uint64_t>());
        }
      }
      for (const auto& [ns, arr] : j.at("keys").items())
        for (const auto& key : arr) state_.keys[ns].insert(key.get<std::string>());
    } catch (const json::exception& e) {
      throw Error(Errc::CorruptStore, std::string("bad snapshot: ") + e.what());
    }
  }

  void replay_batch(std::string_view payload) {
    try {
      const json batch = json::parse(payload);
      for (const auto& op : batch) {
        const auto& name = op.at("op").get_ref<const std::string&>();
        if (name == "put") {
          load_entity(op);
        } else if (name == "del") {
          const auto kind = kind_from_name(op.at("kind").get<std::string>());
          if (!kind) throw Error(Errc::CorruptStore, "unknown kind in WAL");
          state_.erase({*kind, op.at("id").get<std::uint64_t>()});
        } else if (name == "key") {
          state_.keys[op.at("ns").get<std::string>()].insert(op.at("key").get<std::string>());
        } else {
          throw Error(Errc::CorruptStore, "unknown WAL op " + name);
        }
      }
    } catch (const json::exception& e) {
      throw Error(Errc::CorruptStore, std::string("bad WAL batch: ") + e.what());
    }
  }

  StoreOptions opts_;
  mutable std::shared_mutex mu_;
  detail::StoreState state_;
  std::unique_ptr<Journal> journal_;
};

/// Mutable access inside `Store::write`. Every primitive change is logged
/// both for rollback and for the WAL batch.
class Store::Txn : public StoreView {
 public:
  explicit Txn(Store& store)
      : StoreView(store.state_, store.opts_), store_(store), state_(store.state_), saved_ids_(state_.last_id) {}

  Instant now() const { return store_.opts_.clock(); }

  /// Stores a validated entity under a fresh id. HistoricalLocations are
  /// system-managed and refused here.
  EntityRef create(Entity e) {
    if (kind_of(e) == EntityKind::HistoricalLocation)
      throw Error(Errc::ConflictingSystemEntity, "HistoricalLocations are recorded by the server",
                  "HistoricalLocation");
    return insert(std::move(e));
  }

  Entity update(EntityRef ref, const json& patch) {
    const Entity old = get(ref);
    if (!patch.is_object())
      throw Error(Errc::ValidationErrors, "patch must be a JSON object",
                  std::vector<Violation>{{Errc::BadFieldType, "", "patch must be a JSON object"}});
    for (const char* k : {"id", "@iot.id", "@iot.selfLink"})
      if (patch.contains(k)) throw Error(Errc::ImmutableField, std::string(k) + " cannot be changed", k);
    if (ref.kind == EntityKind::HistoricalLocation)
      for (const char* k : {"Thing", "Locations"})
        if (patch.contains(k)) throw Error(Errc::ImmutableField, std::string(k) + " is system-managed", k);

    json merged = to_field_map(old);
    merged.merge_patch(patch);
    auto vr = validate_entity(ref.kind, merged, store_.opts_.field_policy);
    if (!vr.ok()) throw Error(Errc::ValidationErrors, "patched entity is invalid", std::move(vr.violations));
    Entity next = std::move(*vr.entity);
    set_id(next, ref.id);
    check_refs(next);
    if (auto* obs = std::get_if<Observation>(&next); obs && !obs->feature_of_interest)
      obs->feature_of_interest = auto_feature(obs->datastream);
    put(next);

    if (ref.kind == EntityKind::Thing) {
      const auto& before = std::get<Thing>(old).locations;
      const auto& after = std::get<Thing>(next).locations;
      if (before != after && !after.empty()) insert(derive_historical_location(ref, after, now()));
    }
    return next;
  }

  CascadeReport remove(EntityRef ref) {
    get(ref);
    auto refuse_if_used = [&](EntityKind dependent) {
      auto users = referrers(ref, dependent);
      if (users.empty()) return;
      std::string names;
      for (const auto& u : users) names += (names.empty() ? "" : ", ") + to_string(u);
      throw Error(Errc::InUse, to_string(ref) + " is still referenced by " + names,
                  std::string(collection_name(dependent)));
    };
    if (ref.kind == EntityKind::Sensor || ref.kind == EntityKind::ObservedProperty)
      refuse_if_used(EntityKind::Datastream);
    if (ref.kind == EntityKind::FeatureOfInterest) refuse_if_used(EntityKind::Observation);

    CascadeReport report;
    std::set<EntityRef> doomed;
    auto doom = [&](EntityRef r) {
      if (doomed.insert(r).second) report.deleted.push_back(r);
    };
    doom(ref);
    for (std::size_t i = 0; i < report.deleted.size(); ++i) {
      const auto cur = report.deleted[i];
      if (cur.kind == EntityKind::Thing) {
        for (auto d : referrers(cur, EntityKind::Datastream)) doom(d);
        for (auto h : referrers(cur, EntityKind::HistoricalLocation)) doom(h);
      } else if (cur.kind == EntityKind::Datastream) {
        for (auto o : referrers(cur, EntityKind::Observation)) doom(o);
      }
    }

    if (ref.kind == EntityKind::Location) {
      for (auto t : referrers(ref, EntityKind::Thing)) {
        Thing thing = std::get<Thing>(get(t));
        std::erase(thing.locations, ref);
        put(thing);
        report.unlinked.emplace_back(t, "Locations");
      }
      for (auto h : referrers(ref, EntityKind::HistoricalLocation)) {
        HistoricalLocation hist = std::get<HistoricalLocation>(get(h));
        std::erase(hist.locations, ref);
        if (hist.locations.empty()) {
          doom(h);
        } else {
          put(hist);
          report.unlinked.emplace_back(h, "Locations");
        }
      }
    }

    for (auto it = report.deleted.rbegin(); it != report.deleted.rend(); ++it) erase(*it);
    return report;
  }

  /// Records `key` under namespace `ns`. Returns false if it was already
  /// present, which callers use for idempotent ingestion.
  bool claim_key(const std::string& ns, const std::string& key) {
    if (has_key(ns, key)) return false;
    state_.keys[ns].insert(key);
    undo_.push_back(UndoKey{ns, key});
    batch_.push_back({{"op", "key"}, {"ns", ns}, {"key", key}});
    return true;
  }

  void rollback() {
    for (auto it = undo_.rbegin(); it != undo_.rend(); ++it) {
      std::visit(
          [this](auto& u) {
            using U = std::decay_t<decltype(u)>;
            if constexpr (std::is_same_v<U, UndoEntity>) {
              if (u.previous)
                state_.put(std::move(*u.previous));
              else
                state_.erase(u.ref);
            } else {
              auto ns = state_.keys.find(u.ns);
              if (ns != state_.keys.end()) ns->second.erase(u.key);
            }
          },
          *it);
    }
    undo_.clear();
    batch_.clear();
    state_.last_id = saved_ids_;
  }

  bool dirty() const { return !batch_.empty(); }
  std::string batch_payload() const { return batch_.dump(); }

 private:
  struct UndoEntity {
    EntityRef ref;
    std::optional<Entity> previous;
  };
  struct UndoKey {
    std::string ns;
    std::string key;
  };

  EntityRef insert(Entity e) {
    if (state_.total >= store_.opts_.max_entities)
      throw Error(Errc::StoreFull, "store holds the maximum of " + std::to_string(store_.opts_.max_entities) +
                                       " entities");
    check_refs(e);
    if (auto* obs = std::get_if<Observation>(&e); obs && !obs->feature_of_interest)
      obs->feature_of_interest = auto_feature(obs->datastream);
    const auto kind = kind_of(e);
    const auto id = state_.last_id[static_cast<std::size_t>(kind)] + 1;
    set_id(e, id);
    const EntityRef ref{kind, id};
    const bool thing_with_locations = kind == EntityKind::Thing && !std::get<Thing>(e).locations.empty();
    std::vector<EntityRef> locs;
    if (thing_with_locations) locs = std::get<Thing>(e).locations;
    put(std::move(e));
    if (thing_with_locations) insert(derive_historical_location(ref, std::move(locs), now()));
    return ref;
  }

  void check_refs(const Entity& e) const {
    for (const auto& h : held_refs(e))
      if (!find(h.target))
        throw Error(Errc::DanglingRef, std::string(h.relation) + " " + to_string(h.target) + " does not exist",
                    std::string(h.relation));
  }

  /// Derives the FeatureOfInterest from the current Location of the
  /// Datastream's Thing, reusing an existing feature at the same point.
  EntityRef auto_feature(EntityRef datastream) {
    const auto& ds = std::get<Datastream>(get(datastream));
    const auto& thing = std::get<Thing>(get(ds.thing));
    if (thing.locations.empty())
      throw Error(Errc::DanglingRef,
                  "observation has no FeatureOfInterest and " + to_string(ds.thing) + " has no Location",
                  "FeatureOfInterest");
    const auto loc_ref = thing.locations.back();
    const auto& loc = std::get<Location>(get(loc_ref));
    if (const Entity* existing = find_first(EntityKind::FeatureOfInterest, [&](const Entity& f) {
          return std::get<FeatureOfInterest>(f).feature == loc.location;
        }))
      return ref_of(*existing);
    FeatureOfInterest f;
    f.name = loc.name;
    f.description = "Generated from " + to_string(loc_ref);
    f.feature = loc.location;
    return insert(std::move(f));
  }

  void put(Entity e) {
    const auto ref = ref_of(e);
    std::optional<Entity> prev;
    if (const Entity* cur = state_.find(ref)) prev = *cur;
    batch_.push_back({{"op", "put"}, {"kind", kind_name(ref.kind)}, {"id", ref.id}, {"fields", to_field_map(e)}});
    state_.put(std::move(e));
    undo_.push_back(UndoEntity{ref, std::move(prev)});
  }

  void erase(EntityRef ref) {
    auto prev = state_.erase(ref);
    if (!prev) return;
    batch_.push_back({{"op", "del"}, {"kind", kind_name(ref.kind)}, {"id", ref.id}});
    undo_.push_back(UndoEntity{ref, std::move(prev)});
  }

  Store& store_;
  detail::StoreState& state_;
  std::array<std::uint64_t, kEntityKindCount> saved_ids_;
  std::vector<std::variant<UndoEntity, UndoKey>> undo_;
  json batch_ = json::array();
};

template <class Fn>
decltype(auto) Store::write(Fn&& fn) {
  std::unique_lock lock(mu_);
  Txn txn(*this);
  auto commit = [&] {
    if (!journal_ || !txn.dirty()) return;
    try {
      journal_->append(txn.batch_payload());
    } catch (...) {
      txn.rollback();
      throw;
    }
    if (journal_->wal_bytes() > opts_.checkpoint_wal_bytes) journal_->checkpoint(snapshot_payload());
  };
  try {
    if constexpr (std::is_void_v<std::invoke_result_t<Fn, Txn&>>) {
      fn(txn);
      commit();
    } else {
      auto result = fn(txn);
      commit();
      return result;
    }
  } catch (...) {
    txn.rollback();
    throw;
  }
}

inline EntityRef Store::create(Entity e) {
  return write([&](Txn& t) { return t.create(std::move(e)); });
}

inline Entity Store::update(EntityRef r, const json& patch) {
  return write([&](Txn& t) { return t.update(r, patch); });
}

inline CascadeReport Store::remove(EntityRef r) {
  return write([&](Txn& t) { return t.remove(r); });
}

}  // namespace sensorhub
