#ifndef OFEE_COMMON_H_
#define OFEE_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ofee {

// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kConfig,
  kMissingArtifact,
  kData,
  kBackend,
  kInvalidArgument,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Collapses whitespace runs to a single space and trims both ends.
std::string NormalizeWhitespace(std::string_view text);

// Splits on every occurrence of a (non-empty) separator string.
std::vector<std::string> SplitOn(std::string_view text, std::string_view sep);

std::string Join(const std::vector<std::string> &parts, std::string_view sep);

bool ContainsWhitespace(std::string_view text);

// 64-bit FNV-1a; used for feature hashing and config fingerprints.
uint64_t Fingerprint(std::string_view data, uint64_t seed = 0);

std::string HexFingerprint(std::string_view data);

// Shortest decimal text that reads back to the same double.
std::string FormatDouble(double value);

}  // namespace ofee

#endif  // OFEE_COMMON_H_
