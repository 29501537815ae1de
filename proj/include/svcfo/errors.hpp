#pragma once

#include <stdexcept>
#include <string>

namespace svcfo {

// Every diagnostic the toolkit can raise. The name of the code is part of
// the user-facing message, so tools and tests can match on it.
enum class Err {
    // language-core
    SyntaxError,
    UnterminatedMetaError,
    MetaSyntaxError,
    UnknownNodeError,
    CycleError,
    InvalidTreeError,
    // fop-transform
    UnknownVarSetError,
    NestedFopError,
    UnknownVariableError,
    AlreadyTransformedError,
    InternalError,
    // failover-mgmt
    BackendIoError,
    SerializationError,
    NoRecordError,
    NoRuleError,
    ConfigError,
    // service-runtime
    RuntimeError,
    UnboundVariableError,
    // cluster-sim
    ScenarioError,
    DeployError,
    NoServerError,
    UnknownPairError,
    // misc plumbing
    IoError,
};

const char* err_name(Err code);

class SvcError : public std::runtime_error {
public:
    SvcError(Err code, const std::string& msg)
        : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}

    Err code() const { return code_; }

private:
    Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) {
    throw SvcError(code, msg);
}

} // namespace svcfo
