#pragma once

#include <stdexcept>
#include <string>

namespace magrec {

// Base class for all pipeline errors so callers can catch the whole family.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// trace i/o
struct FormatError : Error { using Error::Error; };
struct ChannelMismatch : Error { using Error::Error; };
struct RangeError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// detection
struct InsufficientData : Error { using Error::Error; };
struct NoQuietBaseline : Error { using Error::Error; };

// dsp
struct DesignInfeasible : Error { using Error::Error; };
struct NumericalInstability : Error { using Error::Error; };
struct NonFiniteInput : Error { using Error::Error; };
struct SpeedBelowMinimum : Error { using Error::Error; };
struct UndefinedCorrelation : Error { using Error::Error; };

// kinematics
struct NoReliableMatch : Error { using Error::Error; };
struct ZeroEnergy : Error { using Error::Error; };
struct ImplausibleLength : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };

// learning
struct SingleClassError : Error { using Error::Error; };
struct MissingClassError : Error { using Error::Error; };
struct StratificationError : Error { using Error::Error; };

// simulation
struct ClippingError : Error { using Error::Error; };

}  // namespace magrec
