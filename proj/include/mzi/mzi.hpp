#pragma once

#include "mzi/analysis.hpp"
#include "mzi/beam_splitter.hpp"
#include "mzi/config.hpp"
#include "mzi/error.hpp"
#include "mzi/experiment.hpp"
#include "mzi/io.hpp"
#include "mzi/message.hpp"
#include "mzi/network.hpp"
#include "mzi/rng.hpp"
#include "mzi/schedule.hpp"
#include "mzi/svg.hpp"
#include "mzi/theory.hpp"
