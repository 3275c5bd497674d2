//! Fixed filler vocabulary for the synthetic dataset generator.

/// 1000 distinct lowercase words; content never changes so regeneration
/// with the same seed is byte-identical.
pub const FILLER_WORDS: [&str; 1000] = [
    "time", "year", "people", "way", "day", "man", "thing", "woman",
    "life", "child", "world", "school", "state", "family", "student", "group",
    "country", "problem", "hand", "part", "place", "case", "week", "company",
    "system", "program", "question", "work", "government", "number", "night", "point",
    "home", "water", "room", "mother", "area", "money", "story", "fact",
    "month", "lot", "right", "study", "book", "eye", "job", "word",
    "business", "issue", "side", "kind", "head", "house", "service", "friend",
    "father", "power", "hour", "game", "line", "end", "member", "law",
    "car", "city", "community", "name", "president", "team", "minute", "idea",
    "body", "information", "back", "parent", "face", "others", "level", "office",
    "door", "health", "person", "art", "war", "history", "party", "result",
    "change", "morning", "reason", "research", "girl", "guy", "moment", "air",
    "teacher", "force", "education", "foot", "boy", "age", "policy", "process",
    "music", "market", "sense", "nation", "plan", "college", "interest", "death",
    "experience", "effect", "use", "class", "control", "care", "field", "development",
    "role", "effort", "rate", "heart", "drug", "show", "leader", "light",
    "voice", "wife", "police", "mind", "price", "report", "decision", "son",
    "view", "relationship", "town", "road", "arm", "difference", "value", "building",
    "action", "model", "season", "society", "tax", "director", "position", "player",
    "record", "paper", "space", "ground", "form", "event", "official", "matter",
    "center", "couple", "site", "project", "activity", "star", "table", "need",
    "court", "oil", "situation", "cost", "industry", "figure", "street", "image",
    "phone", "data", "picture", "practice", "piece", "land", "product", "doctor",
    "wall", "patient", "worker", "news", "test", "movie", "north", "love",
    "support", "technology", "step", "baby", "computer", "type", "attention", "film",
    "tree", "source", "kid", "direction", "machine", "subject", "rock", "chance",
    "brother", "energy", "period", "summer", "bed", "bill", "detail", "mouth",
    "goal", "food", "performance", "second", "letter", "sound", "purpose", "feeling",
    "knowledge", "plant", "sort", "board", "agency", "wind", "object", "page",
    "answer", "church", "risk", "fire", "future", "south", "stock", "trade",
    "glass", "skin", "crime", "stage", "concern", "wood", "item", "weapon",
    "hospital", "chair", "account", "match", "design", "animal", "dream", "boat",
    "screen", "structure", "rule", "weight", "note", "sign", "language", "nature",
    "training", "window", "specific", "region", "television", "box", "culture", "range",
    "steel", "rain", "truth", "marriage", "manner", "skill", "sister", "professor",
    "operation", "financial", "crowd", "apple", "pattern", "pool", "pain", "dog",
    "media", "thanks", "heat", "fall", "top", "bank", "west", "scene",
    "speech", "attack", "lawyer", "reality", "camera", "village", "oven", "brain",
    "unit", "investment", "wedding", "newspaper", "birth", "gun", "advantage", "brush",
    "resource", "meat", "link", "nose", "beach", "century", "evidence", "conversation",
    "quality", "staff", "science", "loss", "pound", "speed", "argument", "sale",
    "challenge", "airline", "mountain", "bridge", "smile", "fund", "sport", "bird",
    "maybe", "vehicle", "array", "recipe", "bread", "candle", "gift", "tool",
    "wire", "garden", "notice", "radio", "phrase", "contest", "coach", "vision",
    "copy", "term", "string", "winter", "leaf", "branch", "stone", "salt",
    "river", "desert", "castle", "engine", "valley", "ocean", "shadow", "silver",
    "throat", "knife", "smoke", "ticket", "pencil", "mirror", "rice", "soup",
    "bottle", "bell", "coast", "horse", "forest", "cloud", "grass", "bone",
    "snow", "cream", "butter", "sugar", "lemon", "throne", "blanket", "pillow",
    "carpet", "curtain", "drawer", "basket", "ladder", "hammer", "needle", "thread",
    "button", "pocket", "collar", "sleeve", "fabric", "cotton", "leather", "rubber",
    "plastic", "clay", "copper", "iron", "nickel", "carbon", "oxygen", "silicon",
    "cable", "socket", "switch", "lever", "spring", "gear", "wheel", "axle",
    "brake", "clutch", "pedal", "handle", "frame", "panel", "filter", "valve",
    "pump", "tank", "hose", "nozzle", "gauge", "meter", "dial", "sensor",
    "signal", "circuit", "battery", "charger", "adapter", "antenna", "speaker", "monitor",
    "keyboard", "mouse", "printer", "scanner", "folder", "binder", "staple", "eraser",
    "crayon", "marker", "chalk", "easel", "canvas", "sketch", "paint", "palette",
    "statue", "gallery", "museum", "theater", "script", "actor", "singer", "dancer",
    "violin", "piano", "guitar", "trumpet", "drummer", "chorus", "melody", "rhythm",
    "harmony", "tempo", "lyric", "verse", "poem", "novel", "author", "editor",
    "chapter", "index", "margin", "column", "row", "cell", "grid", "chart",
    "graph", "slope", "curve", "angle", "radius", "diameter", "square", "circle",
    "triangle", "hexagon", "sphere", "cube", "prism", "cone", "volume", "surface",
    "border", "corner", "edge", "middle", "bottom", "inner", "outer", "upper",
    "lower", "layer", "depth", "width", "height", "length", "distance", "measure",
    "scale", "ratio", "percent", "fraction", "decimal", "integer", "digit", "sum",
    "total", "average", "median", "mode", "spread", "sample", "census", "survey",
    "ballot", "vote", "voter", "mayor", "senate", "council", "judge", "jury",
    "verdict", "appeal", "clause", "statute", "permit", "license", "patent", "deed",
    "lease", "rent", "mortgage", "invoice", "receipt", "budget", "audit", "ledger",
    "credit", "debit", "loan", "profit", "revenue", "expense", "salary", "wage",
    "bonus", "pension", "refund", "deposit", "coupon", "bargain", "auction", "vendor",
    "buyer", "seller", "client", "broker", "agent", "dealer", "courier", "cargo",
    "freight", "harbor", "port", "anchor", "sail", "mast", "deck", "cabin",
    "crew", "captain", "pilot", "runway", "hangar", "jet", "rocket", "orbit",
    "planet", "comet", "meteor", "galaxy", "nebula", "cosmos", "lunar", "solar",
    "eclipse", "equinox", "horizon", "compass", "latitude", "longitude", "altitude", "terrain",
    "plateau", "canyon", "cliff", "ridge", "summit", "glacier", "tundra", "prairie",
    "meadow", "swamp", "marsh", "lagoon", "reef", "island", "peninsula", "strait",
    "delta", "current", "tide", "wave", "foam", "spray", "mist", "fog",
    "frost", "hail", "sleet", "thunder", "lightning", "storm", "breeze", "gust",
    "cyclone", "drought", "flood", "erosion", "soil", "gravel", "sand", "pebble",
    "boulder", "quartz", "marble", "granite", "fossil", "mineral", "crystal", "gem",
    "pearl", "amber", "coral", "ivory", "timber", "lumber", "plank", "beam",
    "rafter", "shingle", "brick", "mortar", "cement", "asphalt", "curb", "gutter",
    "sewer", "drain", "pipe", "faucet", "sink", "tub", "shower", "toilet",
    "cabinet", "shelf", "counter", "stool", "bench", "sofa", "cushion", "lamp",
    "bulb", "lantern", "torch", "fireplace", "chimney", "furnace", "boiler", "radiator",
    "vent", "duct", "insulation", "attic", "basement", "garage", "porch", "fence",
    "gate", "hedge", "lawn", "shrub", "vine", "blossom", "petal", "stem",
    "root", "bark", "trunk", "twig", "acorn", "walnut", "almond", "cashew",
    "raisin", "grape", "cherry", "plum", "peach", "mango", "banana", "melon",
    "berry", "currant", "fig", "olive", "pepper", "onion", "garlic", "ginger",
    "basil", "thyme", "sage", "mint", "parsley", "celery", "carrot", "potato",
    "tomato", "cabbage", "lettuce", "spinach", "radish", "turnip", "squash", "pumpkin",
    "cucumber", "bean", "lentil", "pea", "corn", "wheat", "barley", "oat",
    "rye", "millet", "flour", "dough", "yeast", "bagel", "muffin", "biscuit",
    "cracker", "pretzel", "waffle", "pancake", "syrup", "honey", "jam", "jelly",
    "pudding", "custard", "sherbet", "sorbet", "cocoa", "coffee", "tea", "cider",
    "juice", "soda", "broth", "gravy", "sauce", "vinegar", "mustard", "ketchup",
    "pickle", "salad", "sandwich", "burger", "sausage", "bacon", "ham", "steak",
    "roast", "stew", "curry", "noodle", "pasta", "cheese", "yogurt", "tofu",
    "omelet", "cereal", "oatmeal", "snack", "feast", "banquet", "buffet", "menu",
    "waiter", "chef", "kitchen", "pantry", "freezer", "fridge", "stove", "kettle",
    "toaster", "blender", "grater", "ladle", "spatula", "whisk", "tong", "skillet",
    "griddle", "platter", "saucer", "mug", "pitcher", "flask", "jar", "lid",
    "cork", "straw", "napkin", "apron", "glove", "scarf", "mitten", "sweater",
    "jacket", "blazer", "tuxedo", "gown", "skirt", "blouse", "trouser", "jean",
    "sock", "slipper", "sandal", "boot", "heel", "lace", "buckle", "zipper",
    "helmet", "visor", "goggle", "badge", "crest", "emblem", "banner", "flag",
    "ribbon", "medal", "trophy", "prize", "award", "honor", "merit", "rank",
    "grade", "diploma", "degree", "campus", "dorm", "lecture", "seminar", "tutorial",
    "quiz", "exam", "essay", "thesis", "journal", "citation", "footnote", "glossary",
    "appendix", "syllabus", "locker", "recess", "tutor", "mentor", "pupil", "scholar",
    "genius", "talent", "instinct", "habit", "custom", "ritual", "festival", "parade",
    "carnival", "circus", "clown", "magician", "puppet", "kite", "balloon", "dice",
    "puzzle", "riddle", "maze", "chess", "checker", "domino", "lottery", "casino",
    "poker", "bingo", "dart", "bowling", "billiard", "arcade", "pinball", "joystick",
    "console", "cartridge", "pixel", "avatar", "quest", "armor", "shield", "sword",
    "arrow", "archer", "spear", "dagger", "cannon", "fortress", "moat", "tower",
    "dungeon", "crown", "scepter", "robe", "cloak", "knight", "squire", "herald",
    "jester", "minstrel", "bard", "saga", "legend", "myth", "fable", "folklore",
    "oracle", "prophet", "wizard", "witch", "giant", "dwarf", "elf", "troll",
    "dragon", "phoenix", "griffin", "unicorn", "mermaid", "siren", "titan", "atlas",
];
