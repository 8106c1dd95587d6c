#!/usr/bin/env node
import { runPot } from "./chart.js";

process.exit(runPot(process.argv.slice(2)));
