#pragma once

#include <stdexcept>
#include <string>

namespace ddqncd {

// Malformed adjacency input: non-square, nonzero diagonal, or a cycle where a DAG is required.
class MalformedGraph : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed data file or dimension mismatch between inputs.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A configuration value violates its documented invariant.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An output path could not be written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A quantity requested from the theorem lab is mathematically undefined
// (e.g. a best/second-best gap over fewer than two candidates).
class UndefinedQuantity : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace ddqncd
