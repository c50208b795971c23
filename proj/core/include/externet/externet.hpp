#pragma once

#include "externet/efficiency.hpp"
#include "externet/errors.hpp"
#include "externet/io.hpp"
#include "externet/lindahl.hpp"
#include "externet/matrix.hpp"
#include "externet/model.hpp"
#include "externet/spectral.hpp"
#include "externet/structure.hpp"
#include "externet/tolerances.hpp"
#include "externet/version.hpp"
