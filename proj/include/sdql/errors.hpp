#pragma once

#include <stdexcept>
#include <string>

namespace sdql {

// Stage of the pipeline an error belongs to; drives CLI exit codes
// (parse=2, type=3, runtime=4).
enum class ErrorStage { Parse, Type, Runtime, Internal };

class SdqlError : public std::runtime_error {
public:
  SdqlError(ErrorStage stage, std::string code, const std::string& msg,
            int line = 0, int col = 0)
      : std::runtime_error(format(code, msg, line, col)),
        stage_(stage), code_(std::move(code)), line_(line), col_(col) {}

  ErrorStage stage() const { return stage_; }
  const std::string& code() const { return code_; }
  int line() const { return line_; }
  int col() const { return col_; }

private:
  static std::string format(const std::string& code, const std::string& msg,
                            int line, int col) {
    std::string s = code;
    if (line > 0) s += " at " + std::to_string(line) + ":" + std::to_string(col);
    s += ": " + msg;
    return s;
  }

  ErrorStage stage_;
  std::string code_;
  int line_, col_;
};

[[noreturn]] inline void parse_error(const std::string& code, const std::string& msg,
                                     int line = 0, int col = 0) {
  throw SdqlError(ErrorStage::Parse, code, msg, line, col);
}
[[noreturn]] inline void type_error(const std::string& code, const std::string& msg,
                                    int line = 0, int col = 0) {
  throw SdqlError(ErrorStage::Type, code, msg, line, col);
}
[[noreturn]] inline void runtime_error(const std::string& code, const std::string& msg) {
  throw SdqlError(ErrorStage::Runtime, code, msg);
}
[[noreturn]] inline void internal_error(const std::string& code, const std::string& msg) {
  throw SdqlError(ErrorStage::Internal, code, msg);
}

} // namespace sdql
