#pragma once

#include "qdeph/bath.hpp"
#include "qdeph/correlations.hpp"
#include "qdeph/dephasing.hpp"
#include "qdeph/errors.hpp"
#include "qdeph/oracle.hpp"
#include "qdeph/parallel.hpp"
#include "qdeph/random_unitary.hpp"
#include "qdeph/scenario.hpp"
#include "qdeph/witnesses.hpp"
