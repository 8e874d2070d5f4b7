#pragma once

#include <stdexcept>
#include <string>

namespace vigil {

// Base for every error the library raises. Each module throws the most
// specific subclass so callers (notably the CLI) can map them to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define VIGIL_DEFINE_ERROR(Name)                  \
    class Name : public Error {                   \
    public:                                       \
        using Error::Error;                       \
    }

VIGIL_DEFINE_ERROR(InvalidAddress);
VIGIL_DEFINE_ERROR(InvalidHex);
VIGIL_DEFINE_ERROR(InvalidContract);
VIGIL_DEFINE_ERROR(UnsupportedInput);
VIGIL_DEFINE_ERROR(DescriptorError);
VIGIL_DEFINE_ERROR(MissingInputFile);
VIGIL_DEFINE_ERROR(ExecutorUnavailable);
VIGIL_DEFINE_ERROR(RpcTransport);
VIGIL_DEFINE_ERROR(RpcError);
VIGIL_DEFINE_ERROR(NotAContract);
VIGIL_DEFINE_ERROR(FileUnreadable);
VIGIL_DEFINE_ERROR(MissingHeader);
VIGIL_DEFINE_ERROR(IoFailure);
VIGIL_DEFINE_ERROR(StorageFailure);
VIGIL_DEFINE_ERROR(UnknownContract);
VIGIL_DEFINE_ERROR(InvalidRange);
VIGIL_DEFINE_ERROR(UnknownTool);
VIGIL_DEFINE_ERROR(EmptyPlan);
VIGIL_DEFINE_ERROR(ConfigError);

#undef VIGIL_DEFINE_ERROR

}  // namespace vigil
