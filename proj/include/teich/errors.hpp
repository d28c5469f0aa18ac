#pragma once

#include <stdexcept>
#include <string>

namespace teich {

// Error taxonomy. The CLI maps these onto its exit-code contract,
// so every throw site picks the kind deliberately.
enum class errc {
    not_hyperbolic,
    degenerate_triple,
    negatively_oriented,
    unknown_generator,
    word_too_long,
    ball_too_large,
    elliptic_found,
    empty_sample,
    invalid_gluing,
    type_mismatch,
    monotonicity_violation,
    anchor_not_hyperbolic,
    anchor_sinks_degenerate,
    anchor_orientation_negative,
    anchor_mismatch,
    invalid_automorphism,
    unknown_cuff,
    no_convergence,
    degenerate_measure,
    parse_error,
    io_error,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::not_hyperbolic:              return "NotHyperbolic";
        case errc::degenerate_triple:           return "DegenerateTriple";
        case errc::negatively_oriented:         return "NegativelyOriented";
        case errc::unknown_generator:           return "UnknownGenerator";
        case errc::word_too_long:               return "WordTooLong";
        case errc::ball_too_large:              return "BallTooLarge";
        case errc::elliptic_found:              return "EllipticFound";
        case errc::empty_sample:                return "EmptySample";
        case errc::invalid_gluing:              return "InvalidGluing";
        case errc::type_mismatch:               return "TypeMismatch";
        case errc::monotonicity_violation:      return "MonotonicityViolation";
        case errc::anchor_not_hyperbolic:       return "AnchorNotHyperbolic";
        case errc::anchor_sinks_degenerate:     return "AnchorSinksDegenerate";
        case errc::anchor_orientation_negative: return "AnchorOrientationNegative";
        case errc::anchor_mismatch:             return "AnchorMismatch";
        case errc::invalid_automorphism:        return "InvalidAutomorphism";
        case errc::unknown_cuff:                return "UnknownCuff";
        case errc::no_convergence:              return "NoConvergence";
        case errc::degenerate_measure:          return "DegenerateMeasure";
        case errc::parse_error:                 return "ParseError";
        case errc::io_error:                    return "IoError";
    }
    return "UnknownError";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
    throw error(code, what);
}

} // namespace teich
