#pragma once

#include "errors.hpp"
#include "geometry.hpp"
#include "tangent.hpp"
#include "band.hpp"
#include "field.hpp"
#include "operators.hpp"
#include "discretization.hpp"
#include "structure_tensor.hpp"
#include "filters.hpp"
#include "image.hpp"
#include "mesh_io.hpp"
#include "pipeline.hpp"
