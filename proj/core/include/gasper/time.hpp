#pragma once

#include <cstdint>
#include <stdexcept>

namespace gasper {

using slot_t = std::int64_t;
using epoch_t = std::int64_t;
using tick_t = std::int64_t;
using validator_t = std::int32_t;
using block_t = std::int32_t;

inline constexpr block_t no_block = -1;

struct config_error : std::runtime_error {
   using std::runtime_error::runtime_error;
};

/// Slot and epoch arithmetic. Ticks are the simulator's unit of time.
struct timing {
   std::int64_t slots_per_epoch = 32;
   std::int64_t ticks_per_slot = 12;
   std::int64_t vote_offset_ticks = 4;

   epoch_t epoch_of(slot_t s) const { return floor_div(s, slots_per_epoch); }
   slot_t first_slot(epoch_t e) const { return e * slots_per_epoch; }
   slot_t last_slot(epoch_t e) const { return (e + 1) * slots_per_epoch - 1; }
   tick_t slot_start(slot_t s) const { return s * ticks_per_slot; }
   tick_t epoch_start(epoch_t e) const { return slot_start(first_slot(e)); }
   tick_t vote_time(slot_t s) const { return slot_start(s) + vote_offset_ticks; }
   slot_t slot_at(tick_t t) const { return floor_div(t, ticks_per_slot); }
   epoch_t epoch_at(tick_t t) const { return epoch_of(slot_at(t)); }

   /// Earliest epoch-aligned time after which every honest validator agrees on
   /// committee assignments.
   tick_t ggst(tick_t gst) const {
      epoch_t e = epoch_at(gst);
      if (gst <= slot_start(last_slot(e)))
         return epoch_start(e + 1);
      return epoch_start(e + 2);
   }

   /// Throws config_error unless E >= 2, 0 < offset < ticks and delta < ticks - offset.
   void validate(tick_t delta) const;

   static std::int64_t floor_div(std::int64_t a, std::int64_t b) {
      std::int64_t q = a / b;
      if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
      return q;
   }
};

}  // namespace gasper
