#pragma once

#include "evcharge/engine.hpp"

#include <memory>
#include <string>

namespace evcharge {

/// A charging strategy: reads the simulator at step t and returns one action
/// per port.
class Controller {
public:
    virtual ~Controller() = default;

    virtual std::string name() const = 0;
    virtual ActionVector act(const Simulator& sim) = 0;
    /// Called before every episode.
    virtual void reset() {}
};

using ControllerPtr = std::unique_ptr<Controller>;

}  // namespace evcharge
