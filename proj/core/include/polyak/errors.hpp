#pragma once

#include <stdexcept>
#include <string>

namespace polyak {

// Caller broke a precondition (dimension mismatch, bad index, ...).
class contract_error : public std::logic_error {
public:
    explicit contract_error(const std::string& what) : std::logic_error(what) {}
};

// A run/certificate/transform was configured inconsistently.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Name not present in a registry (problem zoo, experiment list, ...).
class lookup_error : public std::runtime_error {
public:
    explicit lookup_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polyak
