#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace invarion {

/// Malformed arguments: dimension mismatches, invalid indices.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Scenario configuration that cannot be used as given. `path` names the
/// offending field (e.g. "region.resolution") when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what),
        path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// A cover instance whose candidates do not cover every element.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, std::vector<std::size_t> uncovered)
      : std::runtime_error(what), uncovered_(std::move(uncovered)) {}
  const std::vector<std::size_t>& uncovered() const { return uncovered_; }

 private:
  std::vector<std::size_t> uncovered_;
};

/// A channel cannot carry the number of distinguishable words a strategy
/// needs at the requested block length.
class CapacityError : public std::runtime_error {
 public:
  CapacityError(const std::string& what, std::size_t required,
                std::size_t available)
      : std::runtime_error(what), required_(required), available_(available) {}
  std::size_t required() const { return required_; }
  std::size_t available() const { return available_; }

 private:
  std::size_t required_;
  std::size_t available_;
};

}  // namespace invarion
