#include "svcfo/fom.hpp"

#include "svcfo/errors.hpp"
#include "svcfo/util.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

namespace svcfo {

namespace {

std::int64_t next_stamp(const std::map<FopKey, FopRecord>& records, const std::string& session) {
    std::int64_t max_seen = 0;
    for (const auto& [key, rec] : records)
        if (key.session == session)
            max_seen = std::max(max_seen, rec.stored_at);
    return max_seen + 1;
}

void check_bindings(const std::vector<Binding>& bindings) {
    for (std::size_t i = 0; i < bindings.size(); ++i)
        for (std::size_t j = i + 1; j < bindings.size(); ++j)
            if (bindings[i].name == bindings[j].name)
                fail(Err::SerializationError, "duplicate binding name '" + bindings[i].name + "'");
}

class MemoryStore final : public StateStore {
public:
    std::optional<FopRecord> load(const FopKey& key) override {
        auto it = records_.find(key);
        if (it == records_.end())
            return std::nullopt;
        return it->second;
    }

    void save(const FopKey& key, FopRecord record) override {
        record.stored_at = next_stamp(records_, key.session);
        records_[key] = std::move(record);
    }

    void erase(const FopKey& key) override { records_.erase(key); }

    void erase_session(const std::string& session) override {
        std::erase_if(records_, [&session](const auto& kv) { return kv.first.session == session; });
    }

private:
    std::map<FopKey, FopRecord> records_;
};

/// Session ids map to file names; anything outside [A-Za-z0-9_.-] is %XX-escaped
/// so every id round-trips to a distinct, safe name.
std::string session_file_name(const std::string& session) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : session) {
        if (std::isalnum(c) || c == '_' || c == '.' || c == '-') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xF];
        }
    }
    return out + ".fostate";
}

std::string encode_value(const Value& v) {
    if (is_int(v))
        return std::to_string(as_int(v));
    if (is_bool(v))
        return as_bool(v) ? "true" : "false";
    return percent_encode(as_str(v));
}

Value decode_value(const std::string& type, const std::string& text) {
    if (type == "int") {
        try {
            return make_int(std::stoll(text));
        } catch (const std::exception&) {
            fail(Err::SerializationError, "bad int value '" + text + "'");
        }
    }
    if (type == "bool") {
        if (text == "true")
            return make_bool(true);
        if (text == "false")
            return make_bool(false);
        fail(Err::SerializationError, "bad bool value '" + text + "'");
    }
    if (type == "str")
        return make_str(percent_decode(text));
    fail(Err::SerializationError, "unknown value type '" + type + "'");
}

class FileStore final : public StateStore {
public:
    explicit FileStore(std::string dir) : dir_(std::move(dir)) {}

    std::optional<FopRecord> load(const FopKey& key) override {
        std::map<FopKey, FopRecord> records = read_session(key.session);
        auto it = records.find(key);
        if (it == records.end())
            return std::nullopt;
        return it->second;
    }

    void save(const FopKey& key, FopRecord record) override {
        std::map<FopKey, FopRecord> records = read_session(key.session);
        record.stored_at = next_stamp(records, key.session);
        records[key] = std::move(record);
        write_session(key.session, records);
    }

    void erase(const FopKey& key) override {
        std::map<FopKey, FopRecord> records = read_session(key.session);
        if (records.erase(key) == 0)
            return;
        write_session(key.session, records);
    }

    void erase_session(const std::string& session) override {
        std::error_code ec;
        std::filesystem::remove(session_path(session), ec);
        if (ec)
            fail(Err::BackendIoError, "cannot remove state file: " + ec.message());
    }

private:
    std::filesystem::path session_path(const std::string& session) const {
        return std::filesystem::path(dir_) / session_file_name(session);
    }

    std::map<FopKey, FopRecord> read_session(const std::string& session) const {
        std::filesystem::path path = session_path(session);
        std::error_code ec;
        if (!std::filesystem::exists(path, ec))
            return {};
        return decode_state_file(session, read_file(path.string()));
    }

    void write_session(const std::string& session, const std::map<FopKey, FopRecord>& records) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec)
            fail(Err::BackendIoError, "cannot create state directory '" + dir_ + "': " + ec.message());
        std::filesystem::path path = session_path(session);
        if (records.empty()) {
            std::filesystem::remove(path, ec);
            if (ec)
                fail(Err::BackendIoError, "cannot remove state file: " + ec.message());
            return;
        }
        write_file_atomic(path.string(), encode_state_file(records));
    }

    std::string dir_;
};

} // namespace

std::shared_ptr<StateStore> make_memory_store() {
    return std::make_shared<MemoryStore>();
}

std::shared_ptr<StateStore> make_file_store(const std::string& dir) {
    return std::make_shared<FileStore>(dir);
}

std::string encode_state_file(const std::map<FopKey, FopRecord>& records) {
    std::string out;
    for (const auto& [key, rec] : records) {
        out += "rec " + std::to_string(key.method_id) + " " + std::to_string(key.level) + " " +
               std::to_string(rec.fop_index) + " " + std::to_string(rec.stored_at) + "\n";
        for (const Binding& b : rec.bindings)
            out += "var " + b.name + " " + value_type_name(b.value) + " " + encode_value(b.value) + "\n";
    }
    return out;
}

std::map<FopKey, FopRecord> decode_state_file(const std::string& session, const std::string& text) {
    std::map<FopKey, FopRecord> records;
    FopRecord* current = nullptr;
    int line_no = 0;
    for (const std::string& line : split_lines(text)) {
        ++line_no;
        if (line.empty())
            continue;
        std::istringstream fields(line);
        std::string tag;
        fields >> tag;
        if (tag == "rec") {
            FopKey key{session, 0, 0};
            FopRecord rec;
            if (!(fields >> key.method_id >> key.level >> rec.fop_index >> rec.stored_at) ||
                key.method_id < 1 || key.level < 1 || rec.fop_index < 1)
                fail(Err::SerializationError, "state line " + std::to_string(line_no) + ": bad record header");
            current = &records[key];
            *current = std::move(rec);
        } else if (tag == "var") {
            if (!current)
                fail(Err::SerializationError,
                     "state line " + std::to_string(line_no) + ": var before any record");
            std::string name, type, value;
            if (!(fields >> name >> type))
                fail(Err::SerializationError, "state line " + std::to_string(line_no) + ": bad var line");
            std::getline(fields, value);
            if (!value.empty() && value.front() == ' ')
                value.erase(value.begin());
            current->bindings.push_back({name, decode_value(type, value)});
        } else {
            fail(Err::SerializationError, "state line " + std::to_string(line_no) + ": unknown tag '" + tag + "'");
        }
    }
    return records;
}

Fom::Fom(std::string service, std::shared_ptr<StateStore> store)
    : service_(std::move(service)), store_(std::move(store)) {
    if (!store_)
        fail(Err::InternalError, "FOM requires a state store");
}

int Fom::get_fop_count(const std::string& session, int method_id, int level) {
    std::lock_guard<std::mutex> lock(mu_);
    FopKey key{session, method_id, level};
    auto it = view_.find(key);
    if (it != view_.end())
        return it->second;
    std::optional<FopRecord> rec = store_->load(key);
    int count = rec ? rec->fop_index : 0;
    view_[key] = count;
    return count;
}

void Fom::store_state(const std::string& session, int method_id, int level, int fop_index,
                      std::vector<Binding> bindings) {
    std::lock_guard<std::mutex> lock(mu_);
    if (fop_index < 1)
        fail(Err::InternalError, "fop_index must be positive");
    check_bindings(bindings);
    FopKey key{session, method_id, level};
    FopRecord rec;
    rec.fop_index = fop_index;
    rec.bindings = std::move(bindings);
    store_->save(key, std::move(rec));
    view_[key] = 0; // this activation moved past the FOP; nothing to resume
}

std::vector<Binding> Fom::recover_state(const std::string& session, int method_id, int level, int fop_index) {
    std::lock_guard<std::mutex> lock(mu_);
    FopKey key{session, method_id, level};
    std::optional<FopRecord> rec = store_->load(key);
    if (!rec)
        fail(Err::NoRecordError, "no stored state for session '" + session + "' method " +
                                     std::to_string(method_id) + " level " + std::to_string(level));
    if (rec->fop_index != fop_index)
        fail(Err::NoRecordError, "stored state has index " + std::to_string(rec->fop_index) +
                                     ", recovery asked for " + std::to_string(fop_index));
    view_[key] = 0; // consumed for this activation; record stays durable
    return rec->bindings;
}

void Fom::clear_level(const std::string& session, int method_id, int level) {
    std::lock_guard<std::mutex> lock(mu_);
    FopKey key{session, method_id, level};
    store_->erase(key);
    view_.erase(key);
}

void Fom::clear_session(const std::string& session) {
    std::lock_guard<std::mutex> lock(mu_);
    store_->erase_session(session);
    std::erase_if(view_, [&session](const auto& kv) { return kv.first.session == session; });
}

namespace {

bool is_space_char(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

/// Strict reader for the one XML shape the config uses.
class ConfigParser {
public:
    explicit ConfigParser(const std::string& text) : text_(text) {}

    FomConfig run() {
        skip_space();
        if (text_.compare(pos_, 5, "<?xml") == 0) {
            std::size_t end = text_.find("?>", pos_);
            if (end == std::string::npos)
                fail(Err::ConfigError, "unterminated XML prolog");
            pos_ = end + 2;
            skip_space();
        }
        expect("<failover");
        skip_space();
        FomConfig config;
        if (peek() == '/') {
            expect("/>");
            finish();
            return config;
        }
        expect(">");
        for (;;) {
            skip_space();
            if (text_.compare(pos_, 11, "</failover>") == 0) {
                pos_ += 11;
                break;
            }
            config.rules.push_back(service_rule());
        }
        finish();
        return config;
    }

private:
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_space() {
        while (pos_ < text_.size() && is_space_char(text_[pos_]))
            ++pos_;
    }

    void expect(const std::string& s) {
        if (text_.compare(pos_, s.size(), s) != 0)
            fail(Err::ConfigError, "expected '" + s + "' at offset " + std::to_string(pos_));
        pos_ += s.size();
    }

    void finish() {
        skip_space();
        if (pos_ != text_.size())
            fail(Err::ConfigError, "trailing content after </failover>");
    }

    std::string attr_name() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        if (pos_ == start)
            fail(Err::ConfigError, "expected attribute name at offset " + std::to_string(pos_));
        return text_.substr(start, pos_ - start);
    }

    std::string attr_value() {
        expect("=");
        if (peek() != '"')
            fail(Err::ConfigError, "attribute values must be double-quoted");
        ++pos_;
        std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != '"')
            ++pos_;
        if (pos_ >= text_.size())
            fail(Err::ConfigError, "unterminated attribute value");
        std::string value = text_.substr(start, pos_ - start);
        ++pos_;
        return value;
    }

    FomRule service_rule() {
        expect("<service");
        FomRule rule;
        bool saw_name = false, saw_fom = false, saw_dir = false;
        for (;;) {
            skip_space();
            if (peek() == '/') {
                expect("/>");
                break;
            }
            std::string name = attr_name();
            std::string value = attr_value();
            if (name == "name") {
                if (saw_name)
                    fail(Err::ConfigError, "duplicate 'name' attribute");
                saw_name = true;
                rule.service_pattern = value;
            } else if (name == "fom") {
                if (saw_fom)
                    fail(Err::ConfigError, "duplicate 'fom' attribute");
                saw_fom = true;
                if (value == "memory")
                    rule.backend = Backend::Memory;
                else if (value == "file")
                    rule.backend = Backend::File;
                else
                    fail(Err::ConfigError, "unknown backend '" + value + "' (want memory or file)");
            } else if (name == "dir") {
                if (saw_dir)
                    fail(Err::ConfigError, "duplicate 'dir' attribute");
                saw_dir = true;
                rule.dir = value;
            } else {
                fail(Err::ConfigError, "unknown attribute '" + name + "' on <service>");
            }
        }
        if (!saw_name || rule.service_pattern.empty())
            fail(Err::ConfigError, "<service> needs a nonempty name attribute");
        if (!saw_fom)
            fail(Err::ConfigError, "<service name=\"" + rule.service_pattern + "\"> needs a fom attribute");
        if (rule.backend == Backend::File && rule.dir.empty())
            fail(Err::ConfigError, "file backend for '" + rule.service_pattern + "' needs a dir attribute");
        return rule;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

} // namespace

FomConfig parse_fom_config(const std::string& xml_text) {
    return ConfigParser(xml_text).run();
}

const FomRule& FomFactory::rule_for(const std::string& service_name) const {
    for (const FomRule& rule : config_.rules)
        if (rule.service_pattern == "*" || rule.service_pattern == service_name)
            return rule;
    fail(Err::NoRuleError, "no failover rule matches service '" + service_name + "'");
}

std::shared_ptr<Fom> FomFactory::handle_for(const std::string& service_name) {
    const FomRule& rule = rule_for(service_name);
    std::shared_ptr<StateStore>& store = stores_[service_name];
    if (!store) {
        store = rule.backend == Backend::Memory
                    ? make_memory_store()
                    : make_file_store((std::filesystem::path(rule.dir) / service_name).string());
    }
    return std::make_shared<Fom>(service_name, store);
}

std::shared_ptr<Fom> fom_for_service(const FomConfig& config, const std::string& service_name) {
    FomFactory factory(config);
    return factory.handle_for(service_name);
}

} // namespace svcfo
