#pragma once

#include <stdexcept>
#include <string>

namespace bestseller {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BoilerplateError : Error { using Error::Error; };

struct ManifestError : Error {
    ManifestError(const std::string& what, int row = -1)
        : Error(row >= 0 ? what + " (row " + std::to_string(row) + ")" : what), row(row) {}
    int row;
};

struct BalanceError : Error { using Error::Error; };
struct VocabularyError : Error { using Error::Error; };
struct TrainError : Error { using Error::Error; };
struct AxisError : Error { using Error::Error; };
struct DegenerateAxisError : AxisError { using AxisError::AxisError; };
struct ProjectionError : Error { using Error::Error; };
struct KDEError : Error { using Error::Error; };
struct WordRankError : Error { using Error::Error; };
struct FitError : Error { using Error::Error; };
struct PredictError : Error { using Error::Error; };
struct SplitError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IOError : Error { using Error::Error; };

}  // namespace bestseller
