#include "techrace/error.hpp"

#include <sstream>

namespace techrace {
namespace {

std::string describe(const std::vector<FieldIssue>& issues) {
  std::ostringstream os;
  os << "invalid input:";
  for (const auto& issue : issues) {
    os << ' ' << issue.field << " (" << issue.message << ");";
  }
  return os.str();
}

std::string describe_lookup(const std::string& kind, const std::string& name,
                            const std::vector<std::string>& valid) {
  std::ostringstream os;
  os << "unknown " << kind << " '" << name << "'; valid: ";
  for (std::size_t i = 0; i < valid.size(); ++i) {
    os << (i ? ", " : "") << valid[i];
  }
  return os.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<FieldIssue> issues)
    : Error(describe(issues)), issues_(std::move(issues)) {}

ValidationError::ValidationError(std::string field, std::string message)
    : ValidationError(std::vector<FieldIssue>{
          FieldIssue{std::move(field), std::move(message)}}) {}

LookupError::LookupError(std::string what_kind, std::string name,
                         std::vector<std::string> valid)
    : Error(describe_lookup(what_kind, name, valid)),
      name_(std::move(name)),
      valid_(std::move(valid)) {}

}  // namespace techrace
