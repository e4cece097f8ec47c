#pragma once

#include <stdexcept>
#include <string>

namespace cpsurf {

// Base of every error raised by the library. Callers that only care about
// "something went wrong inside cpsurf" catch this one.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define CPSURF_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                     \
    public:                                                         \
        explicit Name(const std::string& what) : Error(what) {}     \
    }

// band_grid
CPSURF_DEFINE_ERROR(EmptyBand);
CPSURF_DEFINE_ERROR(BandTouchesBoxBoundary);

// surface_geometry
CPSURF_DEFINE_ERROR(DegenerateQuery);
CPSURF_DEFINE_ERROR(NotUnit);
CPSURF_DEFINE_ERROR(IllConditioned);

// discrete_operators
CPSURF_DEFINE_ERROR(FootprintEscapesBand);

// diffusion_filters
CPSURF_DEFINE_ERROR(ConstantInput);
CPSURF_DEFINE_ERROR(NonFiniteState);

// pipeline_io
CPSURF_DEFINE_ERROR(UnparameterizedSurface);
CPSURF_DEFINE_ERROR(MissingColors);
CPSURF_DEFINE_ERROR(IoError);

// cli
CPSURF_DEFINE_ERROR(ConfigError);

#undef CPSURF_DEFINE_ERROR

} // namespace cpsurf
