#pragma once

#include "relmetro/bogoliubov.hpp"
#include "relmetro/cavity.hpp"
#include "relmetro/errors.hpp"
#include "relmetro/estimation.hpp"
#include "relmetro/gaussian.hpp"
#include "relmetro/metrology.hpp"
#include "relmetro/numeric.hpp"
