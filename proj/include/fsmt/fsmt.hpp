#pragma once

#include "fsmt/benchgen.hpp"
#include "fsmt/errors.hpp"
#include "fsmt/io.hpp"
#include "fsmt/model.hpp"
#include "fsmt/optimizer.hpp"
#include "fsmt/parallel.hpp"
#include "fsmt/projection.hpp"
#include "fsmt/rng.hpp"
#include "fsmt/score.hpp"
#include "fsmt/smoothing.hpp"
#include "fsmt/smt2.hpp"
#include "fsmt/spectral.hpp"
#include "fsmt/xbdd.hpp"
