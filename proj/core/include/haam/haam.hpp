#pragma once

#include "haam/checkpoint.hpp"
#include "haam/consensus.hpp"
#include "haam/csr.hpp"
#include "haam/dataio.hpp"
#include "haam/dataset.hpp"
#include "haam/diagnostics.hpp"
#include "haam/error.hpp"
#include "haam/evalkit.hpp"
#include "haam/graph.hpp"
#include "haam/log.hpp"
#include "haam/model.hpp"
#include "haam/spectral.hpp"
#include "haam/synthgen.hpp"
