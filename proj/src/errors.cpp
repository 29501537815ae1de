#include "svcfo/errors.hpp"

namespace svcfo {

const char* err_name(Err code) {
    switch (code) {
    case Err::SyntaxError: return "SyntaxError";
    case Err::UnterminatedMetaError: return "UnterminatedMetaError";
    case Err::MetaSyntaxError: return "MetaSyntaxError";
    case Err::UnknownNodeError: return "UnknownNodeError";
    case Err::CycleError: return "CycleError";
    case Err::InvalidTreeError: return "InvalidTreeError";
    case Err::UnknownVarSetError: return "UnknownVarSetError";
    case Err::NestedFopError: return "NestedFopError";
    case Err::UnknownVariableError: return "UnknownVariableError";
    case Err::AlreadyTransformedError: return "AlreadyTransformedError";
    case Err::InternalError: return "InternalError";
    case Err::BackendIoError: return "BackendIoError";
    case Err::SerializationError: return "SerializationError";
    case Err::NoRecordError: return "NoRecordError";
    case Err::NoRuleError: return "NoRuleError";
    case Err::ConfigError: return "ConfigError";
    case Err::RuntimeError: return "RuntimeError";
    case Err::UnboundVariableError: return "UnboundVariableError";
    case Err::ScenarioError: return "ScenarioError";
    case Err::DeployError: return "DeployError";
    case Err::NoServerError: return "NoServerError";
    case Err::UnknownPairError: return "UnknownPairError";
    case Err::IoError: return "IoError";
    }
    return "Error";
}

} // namespace svcfo
