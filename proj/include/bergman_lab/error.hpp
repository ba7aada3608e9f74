#pragma once

#include <stdexcept>
#include <string>

namespace bergman_lab {

class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class dimension_error : public error {
public:
  using error::error;
};

// A point or parameter lies outside the set an operation is defined on.
class domain_error : public error {
public:
  using error::error;
};

class branch_cut_error : public domain_error {
public:
  using domain_error::domain_error;
};

class normalization_error : public error {
public:
  using error::error;
};

class numeric_error : public error {
public:
  using error::error;
};

inline void require_same_dimension(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw dimension_error(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                          std::to_string(b) + ")");
  }
}

}  // namespace bergman_lab
