#include "g2rigid/error.hpp"

namespace g2rigid {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotSquare: return "NotSquare";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NotAnEigenvalue: return "NotAnEigenvalue";
        case ErrorKind::InvalidCharacteristic: return "InvalidCharacteristic";
        case ErrorKind::InvalidScalar: return "InvalidScalar";
        case ErrorKind::InvalidLambda: return "InvalidLambda";
        case ErrorKind::DegenerateInput: return "DegenerateInput";
        case ErrorKind::RecipeNotFound: return "RecipeNotFound";
        case ErrorKind::InvalidRecipe: return "InvalidRecipe";
        case ErrorKind::DenominatorClash: return "DenominatorClash";
        case ErrorKind::BadResidue: return "BadResidue";
        case ErrorKind::BadCharacteristic: return "BadCharacteristic";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::NotOrdinary: return "NotOrdinary";
        case ErrorKind::NotSemisimple: return "NotSemisimple";
        case ErrorKind::TooSmallPrime: return "TooSmallPrime";
        case ErrorKind::NotInBase: return "NotInBase";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::CacheUnavailable: return "CacheUnavailable";
    }
    return "Unknown";
}

}  // namespace g2rigid
