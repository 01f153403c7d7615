#include "gasper/time.hpp"

#include <string>

namespace gasper {

void timing::validate(tick_t delta) const {
   if (slots_per_epoch < 2)
      throw config_error("slots_per_epoch must be >= 2");
   if (ticks_per_slot < 2)
      throw config_error("ticks_per_slot must be >= 2");
   if (vote_offset_ticks <= 0 || vote_offset_ticks >= ticks_per_slot)
      throw config_error("vote_offset_ticks must lie strictly between 0 and ticks_per_slot");
   if (delta < 0)
      throw config_error("delta_ticks must be non-negative");
   if (delta >= ticks_per_slot - vote_offset_ticks)
      throw config_error("delta_ticks must be < ticks_per_slot - vote_offset_ticks (" +
                         std::to_string(ticks_per_slot - vote_offset_ticks) + ")");
}

}  // namespace gasper
