#pragma once

#include "emden/classify.hpp"
#include "emden/dynamics.hpp"
#include "emden/errors.hpp"
#include "emden/families.hpp"
#include "emden/field.hpp"
#include "emden/invariants.hpp"
#include "emden/io.hpp"
#include "emden/params.hpp"
#include "emden/quadrature.hpp"
#include "emden/transforms.hpp"
