#pragma once

#include "svcfo/value.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace svcfo {

/// Storage key: where a FOP record lives. The fop_index is data, not key,
/// mirroring getFOPCount(sID, mID, levelCount).
struct FopKey {
    std::string session;
    int method_id = 0;
    int level = 0;

    friend auto operator<=>(const FopKey&, const FopKey&) = default;
};

struct Binding {
    std::string name;
    Value value;

    friend bool operator==(const Binding&, const Binding&) = default;
};

struct FopRecord {
    int fop_index = 0;
    std::vector<Binding> bindings;
    std::int64_t stored_at = 0; // logical, monotonic per session

    friend bool operator==(const FopRecord&, const FopRecord&) = default;
};

/// Persistence backend. One record per key; replacement on save.
class StateStore {
public:
    virtual ~StateStore() = default;
    virtual std::optional<FopRecord> load(const FopKey& key) = 0;
    /// Stamps record.stored_at (monotonic within the session) and persists it.
    virtual void save(const FopKey& key, FopRecord record) = 0;
    virtual void erase(const FopKey& key) = 0;
    virtual void erase_session(const std::string& session) = 0;
};

std::shared_ptr<StateStore> make_memory_store();
/// Files live at `<dir>/<session>.fostate`; the directory is created on demand.
std::shared_ptr<StateStore> make_file_store(const std::string& dir);

/// Serialized .fostate body for a session's records (sorted, bit-stable).
std::string encode_state_file(const std::map<FopKey, FopRecord>& records);
std::map<FopKey, FopRecord> decode_state_file(const std::string& session, const std::string& text);

/// One FOM connection, as held by a single service process. The handle tracks
/// which keys the current process has already seen (the activation view), so
/// a stored record only reads as "resume here" until it is consumed; a fresh
/// handle over the same store models a restarted process.
class Fom {
public:
    Fom(std::string service, std::shared_ptr<StateStore> store);

    Fom(const Fom&) = delete;
    Fom& operator=(const Fom&) = delete;

    /// MethodFOPCount of the FOP last passed at this key, 0 when none applies.
    int get_fop_count(const std::string& session, int method_id, int level);
    void store_state(const std::string& session, int method_id, int level, int fop_index,
                     std::vector<Binding> bindings);
    /// Fails with NoRecordError when the key is empty or holds another index.
    std::vector<Binding> recover_state(const std::string& session, int method_id, int level, int fop_index);
    /// Drops the record for one key; no-op when absent.
    void clear_level(const std::string& session, int method_id, int level);
    /// Drops every record of the session (normal completion).
    void clear_session(const std::string& session);

    const std::string& service() const { return service_; }
    const std::shared_ptr<StateStore>& store() const { return store_; }

private:
    std::mutex mu_;
    std::string service_;
    std::shared_ptr<StateStore> store_;
    std::map<FopKey, int> view_; // key → index reported to this process
};

enum class Backend { Memory, File };

struct FomRule {
    std::string service_pattern; // exact name or "*"
    Backend backend = Backend::Memory;
    std::string dir; // file backend root; one subdirectory per service
};

struct FomConfig {
    std::vector<FomRule> rules;
};

/// Parses the `<failover><service name=".." fom="memory|file" dir=".."/></failover>`
/// config format. Throws ConfigError on anything outside that subset.
FomConfig parse_fom_config(const std::string& xml_text);

/// Hands out FOM handles per service. The backing store is created once per
/// service and shared by every handle, so state survives handle turnover
/// (what a process restart looks like to the management side).
class FomFactory {
public:
    explicit FomFactory(FomConfig config) : config_(std::move(config)) {}

    /// First matching rule wins; NoRuleError when nothing matches.
    std::shared_ptr<Fom> handle_for(const std::string& service_name);

private:
    const FomRule& rule_for(const std::string& service_name) const;

    FomConfig config_;
    std::map<std::string, std::shared_ptr<StateStore>> stores_;
};

/// Single-shot form: a fresh handle over a fresh store connection. Durable
/// backends see prior state; the memory backend starts empty.
std::shared_ptr<Fom> fom_for_service(const FomConfig& config, const std::string& service_name);

} // namespace svcfo
