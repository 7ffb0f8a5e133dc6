#pragma once

#include "certificates.hpp"
#include "constructions.hpp"
#include "error.hpp"
#include "gabor.hpp"
#include "hgrid.hpp"
#include "invariance.hpp"
#include "oracles.hpp"
#include "parallel.hpp"
#include "phase.hpp"
#include "rational.hpp"
#include "serialize.hpp"
#include "spread.hpp"
#include "window.hpp"
#include "zak.hpp"
