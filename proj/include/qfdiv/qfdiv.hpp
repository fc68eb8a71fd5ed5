#pragma once

#include "qfdiv/divergence.hpp"
#include "qfdiv/error.hpp"
#include "qfdiv/extremal.hpp"
#include "qfdiv/functions.hpp"
#include "qfdiv/hermitian.hpp"
#include "qfdiv/kernels.hpp"
#include "qfdiv/majorization.hpp"
#include "qfdiv/matrix_io.hpp"
#include "qfdiv/optimizer.hpp"
#include "qfdiv/quadrature.hpp"
#include "qfdiv/random.hpp"
#include "qfdiv/report_io.hpp"
#include "qfdiv/verify.hpp"
