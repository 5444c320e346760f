#pragma once

#include <stdexcept>
#include <string>

namespace corpuskit {

// Process-level status codes; the CLI maps these straight to exit codes and
// the C API returns them verbatim.
enum class StatusCode : int {
  kOk = 0,
  kConfigError = 1,  // bad config, unknown source, missing word list, ...
  kDataError = 2,    // unreadable input, invalid stage output, ...
  kResumeError = 3,  // manifest/input digest mismatch on --resume
};

class PipelineError : public std::runtime_error {
 public:
  PipelineError(StatusCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  StatusCode code() const { return code_; }

 private:
  StatusCode code_;
};

[[noreturn]] inline void throw_config(const std::string& what) {
  throw PipelineError(StatusCode::kConfigError, what);
}

[[noreturn]] inline void throw_data(const std::string& what) {
  throw PipelineError(StatusCode::kDataError, what);
}

[[noreturn]] inline void throw_resume(const std::string& what) {
  throw PipelineError(StatusCode::kResumeError, what);
}

}  // namespace corpuskit
