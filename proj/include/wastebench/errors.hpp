#pragma once

#include <stdexcept>
#include <string>

namespace wastebench {

// Process exit codes used by the CLI.
enum class ExitCode : int { Ok = 0, Usage = 1, Data = 2, Training = 3 };

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what, ExitCode code)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)), code_(code) {}

    const std::string& kind() const noexcept { return kind_; }
    ExitCode exit_code() const noexcept { return code_; }

private:
    std::string kind_;
    ExitCode code_;
};

#define WASTEBENCH_ERROR(Name, Code)                                                   \
    class Name : public Error {                                                        \
    public:                                                                            \
        explicit Name(const std::string& what) : Error(#Name, what, ExitCode::Code) {} \
    }

WASTEBENCH_ERROR(ConfigError, Usage);
WASTEBENCH_ERROR(DecodeError, Data);
WASTEBENCH_ERROR(FormatError, Data);
WASTEBENCH_ERROR(IoError, Data);
WASTEBENCH_ERROR(ValidationError, Data);
WASTEBENCH_ERROR(LayoutError, Data);
WASTEBENCH_ERROR(DegenerateInput, Data);
WASTEBENCH_ERROR(InitError, Data);
WASTEBENCH_ERROR(StratificationError, Training);
WASTEBENCH_ERROR(TrainingError, Training);

#undef WASTEBENCH_ERROR

}  // namespace wastebench
