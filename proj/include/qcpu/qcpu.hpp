#pragma once

// Umbrella header for the whole toolchain.

#include "qcpu/analysis.hpp"
#include "qcpu/assembly.hpp"
#include "qcpu/compiler.hpp"
#include "qcpu/config.hpp"
#include "qcpu/core.hpp"
#include "qcpu/errors.hpp"
#include "qcpu/gate_array.hpp"
#include "qcpu/gates.hpp"
#include "qcpu/instruction.hpp"
#include "qcpu/vm.hpp"
