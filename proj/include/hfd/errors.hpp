#pragma once

#include <stdexcept>
#include <string>

namespace hfd {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define HFD_DEFINE_ERROR(Name)                                    \
    struct Name : Error {                                          \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

HFD_DEFINE_ERROR(RangeError);
HFD_DEFINE_ERROR(DimensionError);
HFD_DEFINE_ERROR(DomainError);
HFD_DEFINE_ERROR(OverflowError);
HFD_DEFINE_ERROR(GeometryError);
HFD_DEFINE_ERROR(ConfigError);
HFD_DEFINE_ERROR(DecayError);
HFD_DEFINE_ERROR(ToleranceError);
HFD_DEFINE_ERROR(TubeError);
HFD_DEFINE_ERROR(StabilityError);
HFD_DEFINE_ERROR(NonPositivityError);
HFD_DEFINE_ERROR(HypothesisError);
HFD_DEFINE_ERROR(WindowError);
HFD_DEFINE_ERROR(SupportError);
HFD_DEFINE_ERROR(BlowupError);
HFD_DEFINE_ERROR(BracketError);

#undef HFD_DEFINE_ERROR

}  // namespace hfd
