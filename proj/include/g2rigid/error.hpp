#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace g2rigid {

enum class ErrorKind {
    NotSquare,
    DimensionMismatch,
    NotAnEigenvalue,
    InvalidCharacteristic,
    InvalidScalar,
    InvalidLambda,
    DegenerateInput,
    RecipeNotFound,
    InvalidRecipe,
    DenominatorClash,
    BadResidue,
    BadCharacteristic,
    TooLarge,
    NotOrdinary,
    NotSemisimple,
    TooSmallPrime,
    NotInBase,
    ParseError,
    CacheUnavailable,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace g2rigid
